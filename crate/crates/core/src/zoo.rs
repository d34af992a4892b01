//! Named unitaries with the graphs they are (or deliberately are not) causal on.

use num_complex::Complex64;

use crate::graph::{NodeLabel, QuantumLabeledGraph};
use crate::localizer::Schedule;
use crate::qca::{make_partitioned_qca, make_shift_qca, make_torus_graph, shift_graph, translation, TorusSpec};
use crate::tensor::{embed, operator_from_action, random_unitary, DenseOperator, Matrix, StateVector, Support};
use crate::Result;

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub unitary: DenseOperator,
    pub graph: QuantumLabeledGraph,
    pub causal: bool,
    pub schedule: Schedule,
    /// Set for translation-invariant automata on the radius-half torus.
    pub torus: Option<TorusSpec>,
}

pub const CAUSAL: &[&str] = &[
    "identity",
    "local-product",
    "shift-3",
    "shift-4",
    "partitioned-1d",
    "cphase-ring",
    "partitioned-2d",
    "qca-1d",
    "qca-2d",
];

pub const NON_CAUSAL: &[&str] = &["distant-swap", "shift-against-edges", "one-sided-cnot"];

pub fn names() -> impl Iterator<Item = &'static str> {
    CAUSAL.iter().chain(NON_CAUSAL).copied()
}

pub fn zoo() -> Vec<ZooEntry> {
    names().map(|n| entry(n).expect("listed name")).collect()
}

pub fn entry(name: &str) -> Option<ZooEntry> {
    build(name).map(|r| r.expect("zoo instances are well formed"))
}

fn ring(l: usize) -> TorusSpec {
    TorusSpec::new(vec![l], 2, 0).expect("valid ring")
}

fn square() -> TorusSpec {
    TorusSpec::new(vec![2, 2], 2, 0).expect("valid torus")
}

fn plain(name: &'static str, description: &'static str, unitary: DenseOperator, graph: QuantumLabeledGraph, causal: bool) -> ZooEntry {
    ZooEntry {
        name,
        description,
        unitary,
        graph,
        causal,
        schedule: Schedule::Greedy,
        torus: None,
    }
}

fn build(name: &str) -> Option<Result<ZooEntry>> {
    let e = match name {
        "identity" => (|| {
            let g = QuantumLabeledGraph::isolated(&[2, 2, 2])?;
            Ok(plain("identity", "identity on three qubits", DenseOperator::identity(g.layout()), g, true))
        })(),
        "local-product" => (|| {
            let g = QuantumLabeledGraph::isolated(&[2, 3, 2])?;
            let l = g.layout();
            let mut u = DenseOperator::identity(l.clone());
            for (x, n) in g.nodes().iter().enumerate() {
                u = u.mul(&embed(&random_unitary(n.dim, 10 + x as u64)?, &Support::nodes([x]), &l)?)?;
            }
            Ok(plain("local-product", "independent random unitaries on a qubit, a qutrit and a qubit", u, g, true))
        })(),
        "shift-3" | "shift-4" => (|| {
            let spec = ring(if name == "shift-3" { 3 } else { 4 });
            let (n, d) = if name == "shift-3" {
                ("shift-3", "right shift on a 3-cycle, edges (x, x-1)")
            } else {
                ("shift-4", "right shift on a 4-cycle, edges (x, x-1)")
            };
            Ok(plain(n, d, make_shift_qca(&spec)?, shift_graph(&spec)?, true))
        })(),
        "partitioned-1d" => (|| {
            let p = make_partitioned_qca(&ring(4), &random_unitary(4, 21)?, &[vec![0], vec![1]])?;
            Ok(plain(
                "partitioned-1d",
                "random two-cell blocks on even then odd pairs of a 4-cycle",
                p.unitary,
                p.graph,
                true,
            ))
        })(),
        "cphase-ring" => (|| {
            let g = QuantumLabeledGraph::ring(4, 2, &[-1, 0, 1])?;
            let l = g.layout();
            let u = operator_from_action(&l, |s: &StateVector| {
                let amps = s
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let bits = l.digits(i);
                        let odd = (0..4).filter(|&x| bits[x] == 1 && bits[(x + 1) % 4] == 1).count() % 2 == 1;
                        if odd {
                            -a
                        } else {
                            *a
                        }
                    })
                    .collect();
                StateVector::new(l.clone(), amps)
            })?;
            Ok(plain("cphase-ring", "controlled-Z on every edge of a 4-cycle, radius-one neighborhoods", u, g, true))
        })(),
        "partitioned-2d" => (|| {
            let p = make_partitioned_qca(&square(), &random_unitary(16, 22)?, &[vec![0, 0], vec![1, 1]])?;
            Ok(plain(
                "partitioned-2d",
                "random 2x2 blocks at offsets (0,0) then (1,1) on a 2x2 torus",
                p.unitary,
                p.graph,
                true,
            ))
        })(),
        "qca-1d" => (|| {
            let spec = ring(4);
            let l = spec.layout();
            let mut phase = Matrix::eye(2);
            phase[[1, 1]] = Complex64::from_polar(1.0, 0.7);
            let phase = DenseOperator::square(phase)?;
            let mut u = translation(&spec, 0, -1)?;
            for x in 0..4 {
                u = u.mul(&embed(&phase, &Support::nodes([x]), &l)?)?;
            }
            Ok(ZooEntry {
                name: "qca-1d",
                description: "phase on |1> then a left shift, radius-half 4-cycle",
                unitary: u,
                graph: make_torus_graph(&spec),
                causal: true,
                schedule: Schedule::TorusOffsets(spec.axes().to_vec()),
                torus: Some(spec),
            })
        })(),
        "qca-2d" => (|| {
            let spec = square();
            Ok(ZooEntry {
                name: "qca-2d",
                description: "exchange and density couplings along radius-half edges of a 2x2 torus, evolved for unit time",
                unitary: exchange_qca(&spec)?,
                graph: make_torus_graph(&spec),
                causal: true,
                schedule: Schedule::TorusOffsets(spec.axes().to_vec()),
                torus: Some(spec),
            })
        })(),
        "distant-swap" => (|| {
            let g = QuantumLabeledGraph::new(
                vec![NodeLabel::new(2, 0); 3],
                [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)],
            )?;
            let l = g.layout();
            let mut swap = Matrix::zeros((4, 4));
            for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                swap[[i, j]] = Complex64::new(1.0, 0.0);
            }
            let u = embed(&DenseOperator::square(swap)?, &Support::nodes([0, 2]), &l)?;
            Ok(plain("distant-swap", "swap of the two ends of a 3-node path", u, g, false))
        })(),
        "shift-against-edges" => (|| {
            let spec = ring(4);
            let g = QuantumLabeledGraph::ring(4, 2, &[1])?;
            Ok(plain("shift-against-edges", "right shift on a 4-cycle with edges (x, x+1)", make_shift_qca(&spec)?, g, false))
        })(),
        "one-sided-cnot" => (|| {
            let g = QuantumLabeledGraph::new(vec![NodeLabel::new(2, 0); 3], [(0, 0), (1, 1), (2, 2), (2, 0)])?;
            let l = g.layout();
            let mut cnot = Matrix::zeros((4, 4));
            for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                cnot[[i, j]] = Complex64::new(1.0, 0.0);
            }
            let u = embed(&DenseOperator::square(cnot)?, &Support::nodes([0, 2]), &l)?;
            Ok(plain("one-sided-cnot", "CNOT from node 0 to node 2 with only the edge (2, 0)", u, g, false))
        })(),
        _ => return None,
    };
    Some(e)
}

/// `exp(−iH)` for a translation-invariant `H` built from exchange and
/// density-density couplings along every non-trivial radius-half edge plus an
/// on-site density term. `H` annihilates the all-quiescent state, so the
/// evolution fixes it.
fn exchange_qca(spec: &TorusSpec) -> Result<DenseOperator> {
    let l = spec.layout();
    let n = l.total_dim();
    let mut h = Matrix::zeros((n, n));
    let c = |re: f64| Complex64::new(re, 0.0);
    let mut pair = Matrix::zeros((4, 4));
    let cube = spec.unit_cube();
    for (k, z) in cube.iter().enumerate().skip(1) {
        let (j, v) = (0.4 + 0.15 * k as f64, 0.3 * k as f64);
        pair.fill(c(0.0));
        pair[[1, 2]] = c(j);
        pair[[2, 1]] = c(j);
        pair[[3, 3]] = c(v);
        let pair_op = DenseOperator::square(pair.clone())?;
        for x in 0..spec.num_cells() {
            let y = spec.offset(x, z);
            let term = embed_ordered(&pair_op, x, y, &l)?;
            h += term.matrix();
        }
    }
    let mut number = Matrix::zeros((2, 2));
    number[[1, 1]] = c(0.25);
    let number = DenseOperator::square(number)?;
    for x in 0..spec.num_cells() {
        h += embed(&number, &Support::nodes([x]), &l)?.matrix();
    }
    DenseOperator::new(l, expm(&h.mapv(|z| z * Complex64::new(0.0, -1.0))))
}

/// Two-site operator with its factors on `(first, second)` in that order.
fn embed_ordered(op: &DenseOperator, first: usize, second: usize, layout: &crate::tensor::SpaceLayout) -> Result<DenseOperator> {
    use crate::tensor::Slot;
    let local = DenseOperator::from_ordered(&[(Slot::node(first), 2), (Slot::node(second), 2)], op.matrix().clone())?;
    embed(&local, &Support::nodes([first, second]), layout)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &Matrix) -> Matrix {
    let norm = a
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));
    let n = a.nrows();
    let mut sum = Matrix::eye(n);
    let mut term = Matrix::eye(n);
    for k in 1..=24 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}
