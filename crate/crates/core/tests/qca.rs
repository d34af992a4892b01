use num_complex::Complex64;
use qlocal::causality::check_causal_heisenberg;
use qlocal::localizer::{assemble, verify_representation, Schedule};
use qlocal::qca::{
    block_representation, make_partitioned_qca, make_shift_qca, make_torus_graph, shift_graph, verify_shift_invariance,
    BlockOptions, TorusSpec,
};
use qlocal::tensor::{check_unitary, random_unitary, Matrix};
use qlocal::zoo;
use qlocal::Error;

fn swap2() -> Matrix {
    let mut m = Matrix::zeros((4, 4));
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[[i, j]] = Complex64::new(1.0, 0.0);
    }
    m
}

#[test]
fn one_dimensional_automaton_has_two_layers() {
    let e = zoo::entry("qca-1d").unwrap();
    let spec = e.torus.unwrap();
    let rep = block_representation(&e.unitary, &spec, &BlockOptions::default()).unwrap();
    assert_eq!(rep.layers.len(), 2);
    assert_eq!(rep.doubled_alphabet_dim, 4);
    assert!(rep.translation_deviation <= 1e-9);
    assert!(rep.he_eg_deviation <= 1e-8);
    assert_eq!(rep.inputs_checked, 36);
    assert_eq!(rep.s_stage, swap2());
    let h = rep.automaton.unwrap();
    assert!(h.unitarity_residual <= 1e-9);
    assert!(h.shift_deviation <= 1e-9);
}

#[test]
fn two_dimensional_automaton_has_four_layers() {
    let e = zoo::entry("qca-2d").unwrap();
    let spec = e.torus.unwrap();
    let rep = block_representation(&e.unitary, &spec, &BlockOptions::default()).unwrap();
    assert_eq!(rep.layers.len(), 4);
    for layer in &rep.layers {
        assert_eq!(layer.len(), 1);
    }
    assert!(rep.translation_deviation <= 1e-9);
    assert!(rep.he_eg_deviation <= 1e-8);
    let h = rep.automaton.unwrap();
    assert!(h.unitarity_residual <= 1e-9);
    assert!(h.shift_deviation <= 1e-9);
}

#[test]
fn automaton_that_moves_the_quiescent_state_breaks_he_eq_eg() {
    // ⊗u with a generic u: the circuit is still exact, but HE ≠ EG
    let spec = TorusSpec::new(vec![2], 2, 0).unwrap();
    let u = random_unitary(2, 8).unwrap();
    let l = spec.layout();
    let g = qlocal::tensor::embed(&u, &qlocal::tensor::Support::nodes([0]), &l)
        .unwrap()
        .mul(&qlocal::tensor::embed(&u, &qlocal::tensor::Support::nodes([1]), &l).unwrap())
        .unwrap();
    assert!(matches!(
        block_representation(&g, &spec, &BlockOptions::default()),
        Err(Error::VerificationFailure { .. })
    ));
    let a = assemble(&g, &make_torus_graph(&spec), 1e-9, &Schedule::TorusOffsets(vec![2])).unwrap();
    verify_representation(&a.circuit, &g, 20, 0, 1e-8).unwrap();
}

#[test]
fn shift_needs_the_reversed_ring() {
    let spec = TorusSpec::new(vec![4], 2, 0).unwrap();
    let s = make_shift_qca(&spec).unwrap();
    let on_torus = check_causal_heisenberg(&s, &make_torus_graph(&spec), 1e-9).unwrap();
    assert!(!on_torus.overall);
    assert_eq!(on_torus.failing_nodes(), vec![0, 1, 2, 3]);
    assert!(block_representation(&s, &spec, &BlockOptions::default()).is_err());

    let g = shift_graph(&spec).unwrap();
    assert!(check_causal_heisenberg(&s, &g, 1e-9).unwrap().overall);
    let a = assemble(&s, &g, 1e-9, &Schedule::Greedy).unwrap();
    verify_representation(&a.circuit, &s, 20, 0, 1e-8).unwrap();
}

#[test]
fn partitioned_automata_are_even_invariant_and_causal_on_their_graph() {
    for (axes, seed) in [(vec![4], 1u64), (vec![6], 2), (vec![2, 2], 3)] {
        let spec = TorusSpec::new(axes.clone(), 2, 0).unwrap();
        let dim = 1 << (1 << axes.len());
        let offsets: Vec<Vec<usize>> = vec![vec![0; axes.len()], vec![1; axes.len()]];
        let p = make_partitioned_qca(&spec, &random_unitary(dim, seed).unwrap(), &offsets).unwrap();
        assert!(check_unitary(&p.unitary, 1e-10).0);
        assert!(verify_shift_invariance(&p.unitary, &spec, 2, 1e-9).unwrap().0, "{axes:?}");
        assert!(check_causal_heisenberg(&p.unitary, &p.graph, 1e-9).unwrap().overall, "{axes:?}");
    }
}

#[test]
fn partitioned_light_cone_on_six_cells() {
    let spec = TorusSpec::new(vec![6], 2, 0).unwrap();
    let p = make_partitioned_qca(&spec, &random_unitary(4, 4).unwrap(), &[vec![0], vec![1]]).unwrap();
    // last stage pairs (1,2),(3,4),(5,0); first stage (0,1),(2,3),(4,5)
    assert_eq!(p.graph.neighbors(0).unwrap(), vec![0, 1, 4, 5]);
    assert_eq!(p.graph.neighbors(1).unwrap(), vec![0, 1, 2, 3]);
}
