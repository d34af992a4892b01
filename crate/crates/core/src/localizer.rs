//! Compilation of a causal unitary into a circuit of neighborhood-local gates.
//!
//! The construction works on two copies ("tapes") of every node:
//!
//! 1. Encoding puts the quiescent state on the computed tape and the input on
//!    the uncomputed tape.
//! 2. For every node `x`, `K_x = U·Swap_x·U†` (with `U` acting on the computed
//!    tape) moves node `x` of the input across. When `U` is causal, `K_x` is
//!    localized on `N^T_x` of the computed tape plus `x` of the uncomputed
//!    tape, and all `K_x` commute.
//! 3. Decoding swaps the two tapes, leaving `|φ⟩ ⊗ U|ψ⟩` with
//!    `|φ⟩ = U†(⊗|q⟩)`. When `|φ⟩` is a product state, a layer of single-node
//!    gates resets the computed tape to `⊗|q⟩`.
//!
//! Gates are never materialized on the doubled space; their local blocks are
//! read off column by column through state application.

use ndarray::Array1;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{conflict_coloring, offset_coloring, Coloring, DegreeStats, QuantumLabeledGraph};
use crate::tensor::{
    apply_on_support, check_unitary, commutator_norm, embed, extract_local_block, max_abs_diff, DenseOperator, Matrix,
    Slot, SpaceLayout, StateVector, Support, COMPUTED, UNCOMPUTED,
};

/// Default tolerance for certification steps.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for end-to-end circuit equality.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

/// Two tapes per node; the pair for a node is adjacent in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledLayout {
    base: QuantumLabeledGraph,
    layout: SpaceLayout,
}

impl DoubledLayout {
    pub fn new(base: &QuantumLabeledGraph) -> Self {
        let entries = base
            .nodes()
            .iter()
            .enumerate()
            .flat_map(|(x, n)| [(Slot::new(COMPUTED, x), n.dim), (Slot::new(UNCOMPUTED, x), n.dim)]);
        DoubledLayout {
            base: base.clone(),
            layout: SpaceLayout::new(entries).expect("graph dims are valid"),
        }
    }

    pub fn base(&self) -> &QuantumLabeledGraph {
        &self.base
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn tape(&self, tape: u8) -> Support {
        Support::on_tape(tape, 0..self.base.num_nodes())
    }

    /// Quiescent index for every slot, both tapes.
    pub fn quiescent_fill(&self) -> Vec<usize> {
        self.layout
            .slots()
            .iter()
            .map(|s| self.base.nodes()[s.node].quiescent)
            .collect()
    }

    fn shifted_fill(&self) -> Vec<usize> {
        self.layout
            .slots()
            .iter()
            .map(|s| {
                let n = self.base.nodes()[s.node];
                (n.quiescent + 1) % n.dim
            })
            .collect()
    }

    /// Offsets of computed-tape configurations (`.sub`) and uncomputed-tape
    /// configurations (`.rest`), both indexed by base-space basis index.
    fn tape_offsets(&self) -> crate::tensor::IndexSplit {
        self.layout.split(&self.tape(COMPUTED)).expect("computed tape is in layout")
    }

    fn check_base_state(&self, psi: &StateVector) -> Result<()> {
        let n = self.base.layout().total_dim();
        if psi.amplitudes().len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.amplitudes().len(),
            });
        }
        Ok(())
    }

    /// `|a⟩_computed ⊗ |b⟩_uncomputed` for two base-space vectors.
    pub fn tensor(&self, computed: &[Complex64], uncomputed: &[Complex64]) -> Result<StateVector> {
        let split = self.tape_offsets();
        for v in [computed, uncomputed] {
            if v.len() != split.sub.len() {
                return Err(Error::DimensionMismatch {
                    expected: split.sub.len(),
                    found: v.len(),
                });
            }
        }
        let mut amps = vec![Complex64::default(); self.layout.total_dim()];
        for (i, &oi) in split.sub.iter().enumerate() {
            if computed[i] == Complex64::default() {
                continue;
            }
            for (j, &oj) in split.rest.iter().enumerate() {
                amps[oi + oj] = computed[i] * uncomputed[j];
            }
        }
        StateVector::new(self.layout.clone(), amps)
    }

    fn quiescent_vector(&self) -> Vec<Complex64> {
        let base = self.base.layout();
        let mut v = vec![Complex64::default(); base.total_dim()];
        v[base.index(&self.base.quiescent())] = Complex64::new(1.0, 0.0);
        v
    }

    /// Exchanges the two tapes node by node.
    pub fn swap_tapes(&self, state: &StateVector) -> StateVector {
        let split = self.tape_offsets();
        let src = state.amplitudes();
        let mut out = vec![Complex64::default(); src.len()];
        for (i, &oi) in split.sub.iter().enumerate() {
            for (j, &oj) in split.rest.iter().enumerate() {
                out[oi + oj] = src[split.sub[j] + split.rest[i]];
            }
        }
        StateVector::new(self.layout.clone(), out).expect("same layout")
    }
}

/// Encoding: an ancilla in the quiescent state on the computed tape of each node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub ancilla_tape: u8,
    pub quiescent: Vec<usize>,
}

pub fn build_encoding(g: &QuantumLabeledGraph) -> (DoubledLayout, Encoding) {
    let doubled = DoubledLayout::new(g);
    let enc = Encoding {
        ancilla_tape: COMPUTED,
        quiescent: g.quiescent(),
    };
    (doubled, enc)
}

/// `E|ψ⟩ = (⊗|q⟩)_computed ⊗ |ψ⟩_uncomputed`.
pub fn encode(doubled: &DoubledLayout, psi: &StateVector) -> Result<StateVector> {
    doubled.check_base_state(psi)?;
    doubled.tensor(&doubled.quiescent_vector(), psi.amplitudes())
}

/// A gate with its local block and the slots it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGate {
    pub block: DenseOperator,
    pub support: Support,
    pub origin_node: usize,
}

impl LocalGate {
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        apply_on_support(state, &self.block, &self.support)
    }
}

/// Support of `K_x`: `N^T_x` on the computed tape and `x` on the uncomputed tape.
pub fn k_support(g: &QuantumLabeledGraph, x: usize) -> Result<Support> {
    let incoming = g.transpose().neighbors(x)?;
    let mut slots: Vec<Slot> = incoming.into_iter().map(|y| Slot::new(COMPUTED, y)).collect();
    slots.push(Slot::new(UNCOMPUTED, x));
    Support::new(slots)
}

fn swap_matrix(d: usize) -> Matrix {
    let mut m = Matrix::zeros((d * d, d * d));
    for a in 0..d {
        for b in 0..d {
            m[[b * d + a, a * d + b]] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Exchanges node `x`'s computed and uncomputed slots.
pub fn build_swap_x(doubled: &DoubledLayout, x: usize) -> Result<LocalGate> {
    let d = doubled
        .base
        .nodes()
        .get(x)
        .ok_or(Error::InvalidNode(x))?
        .dim;
    let support = Support::new([Slot::new(COMPUTED, x), Slot::new(UNCOMPUTED, x)])?;
    let block = DenseOperator::new(doubled.layout.sub_layout(&support)?, swap_matrix(d))?;
    Ok(LocalGate {
        block,
        support,
        origin_node: x,
    })
}

/// A synthesized `K_x` with its certification residuals.
#[derive(Debug, Clone)]
pub struct SynthesizedGate {
    pub gate: LocalGate,
    pub localization_residual: f64,
    pub unitarity_residual: f64,
}

fn require_unitary(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64) -> Result<DenseOperator> {
    let u = u.relabel(g.layout())?;
    let (ok, residual) = check_unitary(&u, tol);
    if !ok {
        return Err(Error::NonUnitary { residual });
    }
    Ok(u)
}

/// `K_x = U·Swap_x·U†` restricted to its support.
///
/// The block is extracted twice, with the quiescent fill and with a shifted
/// fill off the support; any off-fill leakage or disagreement between the
/// two is a localization failure, which means `U` is not causal on `g`.
pub fn synthesize_k(u: &DenseOperator, g: &QuantumLabeledGraph, x: usize, tol: f64) -> Result<SynthesizedGate> {
    let u = require_unitary(u, g, tol)?;
    synthesize_on(&DoubledLayout::new(g), &u, &u.adjoint(), x, tol)
}

fn synthesize_on(
    doubled: &DoubledLayout,
    u: &DenseOperator,
    u_dag: &DenseOperator,
    x: usize,
    tol: f64,
) -> Result<SynthesizedGate> {
    let computed = doubled.tape(COMPUTED);
    let swap = build_swap_x(doubled, x)?;
    let support = k_support(&doubled.base, x)?;
    let oracle = |psi: &StateVector| {
        let s = apply_on_support(psi, u_dag, &computed)?;
        let s = swap.apply(&s)?;
        apply_on_support(&s, u, &computed)
    };
    let tag = |e: Error| match e {
        Error::LocalizationViolation { residual, .. } => Error::LocalizationViolation {
            node: Some(x),
            residual,
        },
        other => other,
    };
    let (block, r1) =
        extract_local_block(oracle, &support, doubled.layout(), &doubled.quiescent_fill(), tol).map_err(tag)?;
    let (alt, r2) =
        extract_local_block(oracle, &support, doubled.layout(), &doubled.shifted_fill(), tol).map_err(tag)?;
    let spread = block.max_abs_diff(&alt).expect("same support");
    let localization_residual = r1.max(r2).max(spread);
    if localization_residual > tol {
        return Err(Error::LocalizationViolation {
            node: Some(x),
            residual: localization_residual,
        });
    }
    let (ok, unitarity_residual) = check_unitary(&block, tol);
    if !ok {
        return Err(Error::NonUnitaryBlock {
            node: x,
            residual: unitarity_residual,
        });
    }
    Ok(SynthesizedGate {
        gate: LocalGate {
            block,
            support,
            origin_node: x,
        },
        localization_residual,
        unitarity_residual,
    })
}

fn union_layout(a: &DenseOperator, b: &DenseOperator) -> Result<SpaceLayout> {
    let mut entries: Vec<(Slot, usize)> = a.layout().slots().iter().copied().zip(a.layout().dims().iter().copied()).collect();
    for (s, d) in b.layout().slots().iter().zip(b.layout().dims()) {
        if !entries.iter().any(|e| e.0 == *s) {
            entries.push((*s, *d));
        }
    }
    SpaceLayout::new(entries)
}

/// Largest `‖[K_x, K_y]‖` (max-entry) over gate pairs with overlapping supports.
pub fn check_commutation(gates: &[LocalGate]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, a) in gates.iter().enumerate() {
        for b in &gates[i + 1..] {
            if !a.support.intersects(&b.support) {
                continue;
            }
            let joint = union_layout(&a.block, &b.block)?;
            let ea = embed(&a.block, &a.support, &joint)?;
            let eb = embed(&b.block, &b.support, &joint)?;
            worst = worst.max(commutator_norm(&ea, &eb)?);
        }
    }
    Ok(worst)
}

/// Final stage: tape swap, then optionally one gate per node on the computed
/// tape mapping the leftover `|φ⟩` back to `⊗|q⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoding {
    pub uncompute: Option<Vec<DenseOperator>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    doubled: DoubledLayout,
    encoding: Encoding,
    layers: Vec<Vec<LocalGate>>,
    decoding: Decoding,
}

impl Circuit {
    /// Validates that every gate has the `K_x` support shape, a unitary block
    /// of matching size, and that gates within a layer are disjoint.
    pub fn new(
        doubled: DoubledLayout,
        encoding: Encoding,
        layers: Vec<Vec<LocalGate>>,
        decoding: Decoding,
    ) -> Result<Self> {
        let g = &doubled.base;
        if encoding.quiescent != g.quiescent() || encoding.ancilla_tape != COMPUTED {
            return Err(Error::Invalid("encoding does not match the base graph".into()));
        }
        for layer in &layers {
            for (i, gate) in layer.iter().enumerate() {
                if gate.support != k_support(g, gate.origin_node)? {
                    return Err(Error::Invalid(format!(
                        "gate for node {} has an unexpected support",
                        gate.origin_node
                    )));
                }
                let expected = doubled.layout.sub_layout(&gate.support)?;
                if gate.block.dim() != expected.total_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: expected.total_dim(),
                        found: gate.block.dim(),
                    });
                }
                let (ok, residual) = check_unitary(&gate.block, DEFAULT_TOL);
                if !ok {
                    return Err(Error::NonUnitaryBlock {
                        node: gate.origin_node,
                        residual,
                    });
                }
                if layer[i + 1..].iter().any(|o| o.support.intersects(&gate.support)) {
                    return Err(Error::InvalidSchedule(format!(
                        "gate for node {} overlaps another gate in its layer",
                        gate.origin_node
                    )));
                }
            }
        }
        if let Some(ws) = &decoding.uncompute {
            if ws.len() != g.num_nodes() {
                return Err(Error::DimensionMismatch {
                    expected: g.num_nodes(),
                    found: ws.len(),
                });
            }
            for (w, n) in ws.iter().zip(g.nodes()) {
                if w.dim() != n.dim {
                    return Err(Error::DimensionMismatch {
                        expected: n.dim,
                        found: w.dim(),
                    });
                }
            }
        }
        Ok(Circuit {
            doubled,
            encoding,
            layers,
            decoding,
        })
    }

    pub fn doubled(&self) -> &DoubledLayout {
        &self.doubled
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn layers(&self) -> &[Vec<LocalGate>] {
        &self.layers
    }

    pub fn decoding(&self) -> &Decoding {
        &self.decoding
    }

    pub fn gates(&self) -> impl Iterator<Item = &LocalGate> {
        self.layers.iter().flatten()
    }

    /// K-layers plus one layer each for encoding and decoding.
    pub fn depth(&self) -> usize {
        self.layers.len() + 2
    }

    /// Encoding followed by every layer, before decoding.
    pub fn apply_layers(&self, psi: &StateVector) -> Result<StateVector> {
        let mut s = encode(&self.doubled, psi)?;
        for gate in self.gates() {
            s = gate.apply(&s)?;
        }
        Ok(s)
    }

    pub fn decode(&self, state: &StateVector) -> Result<StateVector> {
        let mut s = self.doubled.swap_tapes(state);
        if let Some(ws) = &self.decoding.uncompute {
            for (x, w) in ws.iter().enumerate() {
                s = apply_on_support(&s, w, &Support::single(Slot::new(COMPUTED, x)))?;
            }
        }
        Ok(s)
    }

    /// Full pipeline on a base-space state.
    pub fn run(&self, psi: &StateVector) -> Result<StateVector> {
        self.decode(&self.apply_layers(psi)?)
    }
}

/// How `K_x` gates are grouped into layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// Greedy conflict coloring in ascending node order.
    Greedy,
    /// Parity-of-coordinates classes on a torus with these axis lengths.
    TorusOffsets(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct AssemblyReport {
    pub localization_residuals: Vec<f64>,
    pub unitarity_residuals: Vec<f64>,
    pub max_commutator: f64,
    pub degree: DegreeStats,
    pub coloring: Coloring,
    pub layer_count: usize,
    pub depth: usize,
    /// `layer_count ≤ max|N^T_x ∪ {x}|²`.
    pub within_layer_bound: bool,
    pub quiescent_fixed: bool,
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub circuit: Circuit,
    pub report: AssemblyReport,
}

/// Synthesizes every `K_x`, schedules them and attaches encoding and decoding.
pub fn assemble(u: &DenseOperator, g: &QuantumLabeledGraph, tol: f64, schedule: &Schedule) -> Result<Assembly> {
    let u = require_unitary(u, g, tol)?;
    let u_dag = u.adjoint();
    let (doubled, encoding) = build_encoding(g);
    let synthesized = (0..g.num_nodes())
        .map(|x| synthesize_on(&doubled, &u, &u_dag, x, tol))
        .collect::<Result<Vec<_>>>()?;
    let supports: Vec<Support> = synthesized.iter().map(|s| s.gate.support.clone()).collect();
    let coloring = match schedule {
        Schedule::Greedy => conflict_coloring(&supports),
        Schedule::TorusOffsets(axes) => {
            let col = offset_coloring(axes)?;
            if col.assignment.len() != g.num_nodes() {
                return Err(Error::InvalidSchedule(format!(
                    "torus has {} cells but the graph has {} nodes",
                    col.assignment.len(),
                    g.num_nodes()
                )));
            }
            if !col.is_proper(&supports) {
                return Err(Error::InvalidSchedule("offset classes contain overlapping gates".into()));
            }
            col
        }
    };
    let localization_residuals = synthesized.iter().map(|s| s.localization_residual).collect();
    let unitarity_residuals = synthesized.iter().map(|s| s.unitarity_residual).collect();
    let gates: Vec<LocalGate> = synthesized.into_iter().map(|s| s.gate).collect();
    let max_commutator = check_commutation(&gates)?;
    let layers: Vec<Vec<LocalGate>> = coloring
        .classes()
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| c.into_iter().map(|i| gates[i].clone()).collect())
        .collect();

    let phi = leftover_state(&doubled, &u_dag)?;
    let quiescent = doubled.quiescent_vector();
    let quiescent_fixed = phi
        .iter()
        .zip(&quiescent)
        .all(|(a, b)| (a - b).norm() <= tol);
    let uncompute = product_uncompute(g, &phi, tol)?;

    let degree = g.degree_stats();
    let layer_count = layers.len();
    let circuit = Circuit::new(doubled, encoding, layers, Decoding { uncompute })?;
    let report = AssemblyReport {
        localization_residuals,
        unitarity_residuals,
        max_commutator,
        degree,
        coloring,
        layer_count,
        depth: circuit.depth(),
        within_layer_bound: layer_count <= degree.layer_bound(),
        quiescent_fixed,
    };
    Ok(Assembly { circuit, report })
}

/// `|φ⟩ = U†(⊗|q⟩)`.
fn leftover_state(doubled: &DoubledLayout, u_dag: &DenseOperator) -> Result<Vec<Complex64>> {
    let q = StateVector::new(doubled.base.layout(), doubled.quiescent_vector())?;
    Ok(q.apply(u_dag)?.into_amplitudes())
}

/// Per-node unitaries `W_x` with `(⊗W_x)|φ⟩ = ⊗|q⟩` exactly (phase included),
/// or `None` when `|φ⟩` is not a product state within `tol`.
fn product_uncompute(g: &QuantumLabeledGraph, phi: &[Complex64], tol: f64) -> Result<Option<Vec<DenseOperator>>> {
    let layout = g.layout();
    let state = StateVector::new(layout.clone(), phi.to_vec())?;
    let mut factors: Vec<Vec<Complex64>> = Vec::with_capacity(g.num_nodes());
    for x in 0..g.num_nodes() {
        let rho = state.reduced(&Support::nodes([x]))?;
        let m = rho.matrix();
        let j = (0..m.nrows())
            .max_by(|&a, &b| m[[a, a]].re.total_cmp(&m[[b, b]].re))
            .expect("dim ≥ 1");
        let scale = m[[j, j]].re.sqrt();
        factors.push((0..m.nrows()).map(|i| m[[i, j]] / scale).collect());
    }
    let product = kron_vectors(&factors);
    let overlap: Complex64 = product.iter().zip(phi).map(|(a, b)| a.conj() * b).sum();
    let deviation = product
        .iter()
        .zip(phi)
        .map(|(p, f)| (f - overlap * p).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if deviation > tol || (overlap.norm() - 1.0).abs() > tol {
        return Ok(None);
    }
    if let Some(first) = factors.first_mut() {
        first.iter_mut().for_each(|z| *z *= overlap);
    }
    g.nodes()
        .iter()
        .zip(&factors)
        .map(|(n, v)| DenseOperator::square(rotate_to_basis(v, n.quiescent)))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn kron_vectors(factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    factors.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, f| {
        acc.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect()
    })
}

/// Unitary whose row `target` is `v†`, so that it maps `v` to `|target⟩`.
/// The remaining rows complete an orthonormal basis from the standard basis
/// (so `v = |target⟩` gives the identity).
fn rotate_to_basis(v: &[Complex64], target: usize) -> Matrix {
    let d = v.len();
    let mut basis: Vec<Array1<Complex64>> = vec![Array1::from(v.to_vec())];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut e = Array1::<Complex64>::zeros(d);
        e[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(e.iter()).map(|(x, y)| x.conj() * y).sum();
                e = &e - &(b * proj);
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(e / Complex64::new(norm, 0.0));
        }
    }
    let mut rows = basis.into_iter();
    let first = rows.next().expect("v is part of the basis");
    let mut m = Matrix::zeros((d, d));
    for r in 0..d {
        let b = if r == target { &first } else { &rows.next().expect("d vectors") };
        for c in 0..d {
            m[[r, c]] = b[c].conj();
        }
    }
    m
}

/// Outcome of an end-to-end representation check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub max_deviation: f64,
    pub worst_input: String,
    pub inputs_checked: usize,
}

/// Runs the circuit on every basis state and `num_random` seeded random
/// states and compares with `|φ⟩ ⊗ U|ψ⟩`, where `|φ⟩ = U†(⊗|q⟩)`, or
/// `⊗|q⟩` when the circuit carries an uncompute stage. No phase freedom.
pub fn verify_representation(
    circuit: &Circuit,
    u: &DenseOperator,
    num_random: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let report = representation_deviation(circuit, u, num_random, seed)?;
    if report.max_deviation > tol {
        return Err(Error::VerificationFailure {
            deviation: report.max_deviation,
            worst_input: report.worst_input,
        });
    }
    Ok(report)
}

/// The measurement behind [`verify_representation`], without the verdict.
pub fn representation_deviation(
    circuit: &Circuit,
    u: &DenseOperator,
    num_random: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let doubled = circuit.doubled();
    let base = doubled.base.layout();
    let u = u.relabel(base.clone())?;
    let phi = if circuit.decoding.uncompute.is_some() {
        doubled.quiescent_vector()
    } else {
        leftover_state(doubled, &u.adjoint())?
    };
    let mut inputs: Vec<(String, StateVector)> = (0..base.total_dim())
        .map(|i| Ok((format!("basis {i}"), StateVector::basis(base.clone(), i)?)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..num_random {
        inputs.push((format!("random {k}"), StateVector::random(base.clone(), &mut rng)));
    }
    let mut worst = (0.0f64, String::from("none"));
    for (name, psi) in &inputs {
        let got = circuit.run(psi)?;
        let want = doubled.tensor(&phi, psi.apply(&u)?.amplitudes())?;
        let dev = got.distance(&want);
        if dev > worst.0 || worst.1 == "none" {
            worst = (dev, name.clone());
        }
    }
    Ok(VerificationReport {
        max_deviation: worst.0,
        worst_input: worst.1,
        inputs_checked: inputs.len(),
    })
}

/// Max-entry distance between two blocks; infinite when shapes differ.
pub(crate) fn block_distance(a: &Matrix, b: &Matrix) -> f64 {
    max_abs_diff(a, b).unwrap_or(f64::INFINITY)
}
