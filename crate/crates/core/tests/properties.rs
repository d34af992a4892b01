use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qlocal::causality::{check_causal_heisenberg, check_causal_state_sampled, check_inverse_causal};
use qlocal::graph::{conflict_coloring, offset_coloring, QuantumLabeledGraph};
use qlocal::localizer::{assemble, k_support, verify_representation, Schedule};
use qlocal::qca::{make_partitioned_qca, make_torus_graph, TorusSpec};
use qlocal::tensor::{
    apply_on_support, check_unitary, embed, partial_trace, random_unitary, DenseOperator, Slot, SpaceLayout, StateVector,
    Support,
};

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=4)
}

fn product_of_locals(dims: &[usize], seed: u64) -> (DenseOperator, QuantumLabeledGraph) {
    let g = QuantumLabeledGraph::isolated(dims).unwrap();
    let l = g.layout();
    let mut u = DenseOperator::identity(l.clone());
    for (x, &d) in dims.iter().enumerate() {
        u = u
            .mul(&embed(&random_unitary(d, seed + x as u64).unwrap(), &Support::nodes([x]), &l).unwrap())
            .unwrap();
    }
    (u, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn index_digits_round_trip(dims in dims_strategy(), k in 0usize..1000) {
        let l = SpaceLayout::qudits(&dims).unwrap();
        let i = k % l.total_dim();
        prop_assert_eq!(l.index(&l.digits(i)), i);
    }

    #[test]
    fn random_unitaries_are_unitary(dim in 1usize..=8, seed in any::<u64>()) {
        prop_assert!(check_unitary(&random_unitary(dim, seed).unwrap(), 1e-10).0);
    }

    #[test]
    fn apply_on_support_agrees_with_embedding(dims in dims_strategy(), pick in any::<u64>(), seed in any::<u64>()) {
        let l = SpaceLayout::qudits(&dims).unwrap();
        let nodes: Vec<usize> = (0..dims.len()).filter(|x| (pick >> x) & 1 == 1).collect();
        prop_assume!(!nodes.is_empty());
        let support = Support::nodes(nodes.iter().copied());
        let d: usize = nodes.iter().map(|&x| dims[x]).product();
        let u = random_unitary(d, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::random(l.clone(), &mut rng);
        let fast = apply_on_support(&psi, &u, &support).unwrap();
        let slow = psi.apply(&embed(&u, &support, &l).unwrap()).unwrap();
        prop_assert!(fast.distance(&slow) < 1e-12);
    }

    #[test]
    fn partial_trace_of_embedding_scales_by_the_rest(dims in dims_strategy(), seed in any::<u64>()) {
        let l = SpaceLayout::qudits(&dims).unwrap();
        let u = random_unitary(dims[0], seed).unwrap();
        let e = embed(&u, &Support::nodes([0]), &l).unwrap();
        let rest = (l.total_dim() / dims[0]) as f64;
        let r = partial_trace(&e, &Support::nodes([0])).unwrap();
        let scaled = u.matrix().mapv(|z| z * rest);
        prop_assert!(r.matrix().iter().zip(scaled.iter()).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn ordered_factors_round_trip(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        prop_assume!(a != b);
        let u = random_unitary(6, seed).unwrap();
        let order = [(Slot::node(a), 2), (Slot::node(b), 3)];
        let op = DenseOperator::from_ordered(&order, u.matrix().clone()).unwrap();
        prop_assert_eq!(op.to_ordered(&[Slot::node(a), Slot::node(b)]).unwrap(), u.matrix().clone());
    }

    #[test]
    fn transpose_is_an_involution(n in 1usize..6, edges in prop::collection::vec((0usize..6, 0usize..6), 0..15)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|&(x, y)| x < n && y < n).collect();
        let g = QuantumLabeledGraph::new(vec![qlocal::graph::NodeLabel::new(2, 0); n], edges).unwrap();
        prop_assert_eq!(g.transpose().transpose(), g.clone());
        for x in 0..n {
            for y in g.neighbors(x).unwrap() {
                prop_assert!(g.transpose().neighbors(y).unwrap().contains(&x));
            }
        }
    }

    #[test]
    fn greedy_coloring_is_proper_and_within_bound(n in 1usize..7, edges in prop::collection::vec((0usize..7, 0usize..7), 0..20)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|&(x, y)| x < n && y < n).collect();
        let g = QuantumLabeledGraph::new(vec![qlocal::graph::NodeLabel::new(2, 0); n], edges).unwrap();
        let supports: Vec<Support> = (0..n).map(|x| k_support(&g, x).unwrap()).collect();
        let col = conflict_coloring(&supports);
        prop_assert!(col.is_proper(&supports));
        prop_assert!(col.num_colors <= g.degree_stats().layer_bound());
    }

    #[test]
    fn offset_schedule_is_proper_on_radius_half_tori(axes in prop::collection::vec(prop::sample::select(vec![2usize, 4, 6]), 1..=3)) {
        prop_assume!(axes.iter().product::<usize>() <= 64);
        let spec = TorusSpec::new(axes.clone(), 2, 0).unwrap();
        let g = make_torus_graph(&spec);
        let supports: Vec<Support> = (0..g.num_nodes()).map(|x| k_support(&g, x).unwrap()).collect();
        let col = offset_coloring(&axes).unwrap();
        prop_assert_eq!(col.num_colors, 1 << axes.len());
        prop_assert!(col.is_proper(&supports));
        prop_assert!(col.classes().iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn local_products_are_causal_in_both_pictures(dims in prop::collection::vec(1usize..=3, 1..=3), seed in any::<u64>()) {
        let (u, g) = product_of_locals(&dims, seed);
        prop_assert!(check_causal_heisenberg(&u, &g, 1e-9).unwrap().overall);
        prop_assert!(check_causal_state_sampled(&u, &g, 5, seed, 1e-9).unwrap().overall);
        prop_assert!(check_inverse_causal(&u, &g, 1e-9).unwrap().overall);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn composition_is_causal_on_the_two_step_graph(s0 in any::<u64>(), s1 in any::<u64>()) {
        let spec = TorusSpec::new(vec![4], 2, 0).unwrap();
        let g = QuantumLabeledGraph::ring(4, 2, &[-1, 0, 1]).unwrap();
        let a = make_partitioned_qca(&spec, &random_unitary(4, s0).unwrap(), &[vec![0]]).unwrap().unitary;
        let b = make_partitioned_qca(&spec, &random_unitary(4, s1).unwrap(), &[vec![1]]).unwrap().unitary;
        prop_assert!(check_causal_heisenberg(&a, &g, 1e-9).unwrap().overall);
        prop_assert!(check_causal_heisenberg(&b, &g, 1e-9).unwrap().overall);
        let ab = a.mul(&b).unwrap();
        prop_assert!(check_causal_heisenberg(&ab, &g.two_step(), 1e-9).unwrap().overall);
    }

    #[test]
    fn pictures_agree_on_partitioned_automata(seed in any::<u64>(), stages in 1usize..=2, reverse in any::<bool>()) {
        let spec = TorusSpec::new(vec![4], 2, 0).unwrap();
        let offsets: Vec<Vec<usize>> = (0..stages).map(|s| vec![s]).collect();
        let p = make_partitioned_qca(&spec, &random_unitary(4, seed).unwrap(), &offsets).unwrap();
        let g = if reverse { make_torus_graph(&spec) } else { p.graph.clone() };
        let h = check_causal_heisenberg(&p.unitary, &g, 1e-9).unwrap();
        let s = check_causal_state_sampled(&p.unitary, &g, 20, seed, 1e-9).unwrap();
        prop_assert_eq!(h.overall, s.overall);
        prop_assert_eq!(h.failing_nodes(), s.failing_nodes());
        prop_assert!(check_inverse_causal(&p.unitary, &p.graph, 1e-9).unwrap().overall);
    }

    #[test]
    fn assembled_circuits_represent_partitioned_automata(seed in any::<u64>()) {
        let spec = TorusSpec::new(vec![4], 2, 0).unwrap();
        let p = make_partitioned_qca(&spec, &random_unitary(4, seed).unwrap(), &[vec![0], vec![1]]).unwrap();
        let a = assemble(&p.unitary, &p.graph, 1e-9, &Schedule::Greedy).unwrap();
        prop_assert!(a.report.within_layer_bound);
        prop_assert!(a.report.max_commutator <= 1e-9);
        prop_assert!(a.report.localization_residuals.iter().all(|&r| r <= 1e-9));
        let v = verify_representation(&a.circuit, &p.unitary, 5, seed, 1e-8).unwrap();
        prop_assert!(v.max_deviation <= 1e-8);
    }
}
