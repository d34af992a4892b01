//! Causality certificates for unitaries on quantum labeled graphs.
//!
//! A unitary `U` is causal with respect to a graph when the output state at
//! every node `x` depends only on the input state on `N_x`. Two checks are
//! provided:
//!
//! * [`check_causal_heisenberg`] is complete: `U` is causal iff `U†AU` is
//!   localized on `N_x` for every `A` acting on node `x`. Matrix units span
//!   the operators on `x`, so testing them suffices.
//! * [`check_causal_state_sampled`] is a sound falsifier: it draws pairs of
//!   states agreeing on `N_x` and compares the evolved states at `x`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::QuantumLabeledGraph;
use crate::tensor::{
    apply_on_support, check_unitary, embed, is_localized, matrix_unit, random_unitary_matrix, DenseOperator, Slot,
    StateVector, Support,
};

/// Default number of sampled state pairs per node.
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Heisenberg,
    StateSampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeVerdict {
    pub node: usize,
    pub passed: bool,
    pub residual: f64,
    /// Heisenberg: index `i·d + j` of the worst matrix unit `|i⟩⟨j|`.
    /// Sampled: index of the worst sample.
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalityReport {
    pub picture: Picture,
    pub per_node: Vec<NodeVerdict>,
    pub overall: bool,
    pub unitarity_residual: f64,
}

impl CausalityReport {
    fn from_nodes(picture: Picture, per_node: Vec<NodeVerdict>, unitarity_residual: f64) -> Self {
        let overall = per_node.iter().all(|v| v.passed);
        CausalityReport {
            picture,
            per_node,
            overall,
            unitarity_residual,
        }
    }

    pub fn failing_nodes(&self) -> Vec<usize> {
        self.per_node.iter().filter(|v| !v.passed).map(|v| v.node).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.per_node.iter().map(|v| v.residual).fold(0.0, f64::max)
    }
}

/// `U†·A·U`.
pub fn heisenberg_image(u: &DenseOperator, a: &DenseOperator) -> Result<DenseOperator> {
    let ua = u.adjoint().mul(a)?;
    let img = ua.mul(u)?;
    img.relabel(a.layout().clone())
}

fn on_graph(u: &DenseOperator, g: &QuantumLabeledGraph) -> Result<DenseOperator> {
    u.relabel(g.layout())
}

fn require_unitary(u: &DenseOperator, tol: f64) -> Result<f64> {
    let (ok, residual) = check_unitary(u, tol);
    if !ok {
        return Err(Error::NonUnitary { residual });
    }
    Ok(residual)
}

/// Complete Heisenberg-picture certificate. Refuses non-unitary input.
pub fn check_causal_heisenberg(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64) -> Result<CausalityReport> {
    let u = on_graph(u, g)?;
    require_unitary(&u, tol)?;
    heisenberg_residuals(&u, g, tol)
}

/// The Heisenberg test without the unitarity gate; residuals are reported
/// for any square input, but only certify causality when `U` is unitary.
pub fn heisenberg_residuals(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64) -> Result<CausalityReport> {
    let u = on_graph(u, g)?;
    let layout = g.layout();
    let (_, unitarity_residual) = check_unitary(&u, tol);
    let mut per_node = Vec::with_capacity(g.num_nodes());
    for (x, label) in g.nodes().iter().enumerate() {
        let region = g.neighborhood(x)?;
        let site = Support::single(Slot::node(x));
        let d = label.dim;
        let mut worst = (0.0f64, 0usize);
        for i in 0..d {
            for j in 0..d {
                let unit = DenseOperator::square(matrix_unit(d, i, j))?;
                let a = embed(&unit, &site, &layout)?;
                let (_, r) = is_localized(&heisenberg_image(&u, &a)?, &region, tol)?;
                if r > worst.0 {
                    worst = (r, i * d + j);
                }
            }
        }
        per_node.push(NodeVerdict {
            node: x,
            passed: worst.0 <= tol,
            residual: worst.0,
            witness: (worst.0 > tol).then_some(worst.1),
        });
    }
    Ok(CausalityReport::from_nodes(Picture::Heisenberg, per_node, unitarity_residual))
}

/// A sampled pair of input states that agree on `N_x`, with the distance
/// between their evolved reduced states at `x`.
#[derive(Debug, Clone)]
pub struct SampleWitness {
    pub node: usize,
    pub sample: usize,
    /// `ρ = |ψ⟩⟨ψ|`.
    pub state: StateVector,
    /// `ρ' = VρV†`, `V` supported outside `N_x`.
    pub perturbation: Option<DenseOperator>,
    pub outside: Support,
    pub residual: f64,
}

fn sample_rng(seed: u64, node: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((node as u64) << 32) | sample as u64);
    rng
}

/// Regenerates sample `sample` for node `x` from scratch.
pub fn sample_witness(
    u: &DenseOperator,
    g: &QuantumLabeledGraph,
    x: usize,
    sample: usize,
    seed: u64,
) -> Result<SampleWitness> {
    let u = on_graph(u, g)?;
    let layout = g.layout();
    let region = g.neighborhood(x)?;
    let outside = layout.complement(&region);
    let mut rng = sample_rng(seed, x, sample);
    let state = StateVector::random(layout.clone(), &mut rng);
    let site = Support::single(Slot::node(x));
    if outside.is_empty() {
        return Ok(SampleWitness {
            node: x,
            sample,
            state,
            perturbation: None,
            outside,
            residual: 0.0,
        });
    }
    let v_layout = layout.sub_layout(&outside)?;
    let v = DenseOperator::new(v_layout.clone(), random_unitary_matrix(v_layout.total_dim(), &mut rng))?;
    let perturbed = apply_on_support(&state, &v, &outside)?;
    let out = state.apply(&u)?.reduced(&site)?;
    let out_p = perturbed.apply(&u)?.reduced(&site)?;
    Ok(SampleWitness {
        node: x,
        sample,
        state,
        perturbation: Some(v),
        outside,
        residual: out.distance(&out_p),
    })
}

/// Monte-Carlo falsification of causality in the state picture.
///
/// A failing node is a genuine counterexample; passing is evidence only.
pub fn check_causal_state_sampled(
    u: &DenseOperator,
    g: &QuantumLabeledGraph,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CausalityReport> {
    let u = on_graph(u, g)?;
    let unitarity_residual = require_unitary(&u, tol)?;
    let mut per_node = Vec::with_capacity(g.num_nodes());
    for x in 0..g.num_nodes() {
        let mut worst = (0.0f64, 0usize);
        for s in 0..samples {
            let w = sample_witness(&u, g, x, s, seed)?;
            if w.residual > worst.0 {
                worst = (w.residual, s);
            }
        }
        per_node.push(NodeVerdict {
            node: x,
            passed: worst.0 <= tol,
            residual: worst.0,
            witness: (worst.0 > tol).then_some(worst.1),
        });
    }
    Ok(CausalityReport::from_nodes(Picture::StateSampled, per_node, unitarity_residual))
}

/// Certifies `U†` on the transposed graph.
pub fn check_inverse_causal(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64) -> Result<CausalityReport> {
    check_causal_heisenberg(&u.adjoint(), &g.transpose(), tol)
}
