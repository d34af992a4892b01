//! Quantum cellular automata on finite tori.
//!
//! A torus `Z_{L_0} × … × Z_{L_{n-1}}` stands in for the grid `Zⁿ`. Cells are
//! numbered mixed-radix with axis 0 most significant. The radius-half
//! neighborhood of `x` is `{x + z | z ∈ {0,1}ⁿ}`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeLabel, QuantumLabeledGraph};
use crate::localizer::{assemble, block_distance, encode, Assembly, AssemblyReport, Circuit, Schedule};
use crate::tensor::{
    apply_on_support, check_unitary, operator_from_action, DenseOperator, Matrix, Slot, SpaceLayout, StateVector,
    Support, COMPUTED, UNCOMPUTED,
};

/// Doubled spaces above this dimension are not materialized as matrices.
pub const MAX_MATERIALIZED_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSpec {
    axes: Vec<usize>,
    cell_dim: usize,
    quiescent: usize,
}

impl TorusSpec {
    pub fn new(axes: Vec<usize>, cell_dim: usize, quiescent: usize) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidTorus("at least one axis is required".into()));
        }
        if let Some(l) = axes.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidTorus(format!("axis length {l} is below 2")));
        }
        if cell_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if quiescent >= cell_dim {
            return Err(Error::InvalidTorus(format!(
                "quiescent index {quiescent} out of range for cell dimension {cell_dim}"
            )));
        }
        Ok(TorusSpec {
            axes,
            cell_dim,
            quiescent,
        })
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn cell_dim(&self) -> usize {
        self.cell_dim
    }

    pub fn quiescent(&self) -> usize {
        self.quiescent
    }

    pub fn num_cells(&self) -> usize {
        self.axes.iter().product()
    }

    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::qudits(&vec![self.cell_dim; self.num_cells()]).expect("valid spec")
    }

    pub fn coords(&self, mut node: usize) -> Vec<usize> {
        let mut c = vec![0; self.axes.len()];
        for (k, &l) in self.axes.iter().enumerate().rev() {
            c[k] = node % l;
            node /= l;
        }
        c
    }

    /// Node at `coords`, wrapping every axis.
    pub fn node(&self, coords: &[isize]) -> usize {
        coords
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&c, &l)| acc * l + c.rem_euclid(l as isize) as usize)
    }

    /// `node + delta` on the torus.
    pub fn offset(&self, node: usize, delta: &[isize]) -> usize {
        let c: Vec<isize> = self
            .coords(node)
            .iter()
            .zip(delta)
            .map(|(&a, &b)| a as isize + b)
            .collect();
        self.node(&c)
    }

    /// `{0,1}ⁿ` in lexicographic order, axis 0 most significant.
    pub fn unit_cube(&self) -> Vec<Vec<isize>> {
        let n = self.axes.len();
        (0..1usize << n)
            .map(|m| (0..n).map(|k| ((m >> (n - 1 - k)) & 1) as isize).collect())
            .collect()
    }

    fn labels(&self) -> Vec<NodeLabel> {
        vec![NodeLabel::new(self.cell_dim, self.quiescent); self.num_cells()]
    }

    /// The same torus with each cell replaced by a computed/uncomputed pair.
    pub fn doubled(&self) -> TorusSpec {
        TorusSpec {
            axes: self.axes.clone(),
            cell_dim: self.cell_dim * self.cell_dim,
            quiescent: self.quiescent * self.cell_dim + self.quiescent,
        }
    }
}

/// Radius-half torus: edges `x → x + z` for every `z ∈ {0,1}ⁿ`, self-loops included.
pub fn make_torus_graph(spec: &TorusSpec) -> QuantumLabeledGraph {
    let cube = spec.unit_cube();
    let edges = (0..spec.num_cells()).flat_map(|x| cube.iter().map(move |z| (x, spec.offset(x, z))).collect::<Vec<_>>());
    QuantumLabeledGraph::new(spec.labels(), edges).expect("torus nodes are valid")
}

/// Ring with edges `(x, x − 1)`, on which the right shift is causal.
pub fn shift_graph(spec: &TorusSpec) -> Result<QuantumLabeledGraph> {
    require_1d(spec)?;
    let edges = (0..spec.num_cells()).map(|x| (x, spec.offset(x, &[-1])));
    QuantumLabeledGraph::new(spec.labels(), edges)
}

fn require_1d(spec: &TorusSpec) -> Result<()> {
    if spec.dimension() != 1 {
        return Err(Error::InvalidTorus(format!(
            "expected a one-dimensional torus, got {} axes",
            spec.dimension()
        )));
    }
    Ok(())
}

/// Image of each basis index under translation of cell contents by
/// `amount` along `axis`: `c'_x = c_{x − amount·e_axis}`.
pub fn translation_permutation(spec: &TorusSpec, axis: usize, amount: isize) -> Result<Vec<usize>> {
    if axis >= spec.dimension() {
        return Err(Error::InvalidTorus(format!("axis {axis} out of range")));
    }
    let layout = spec.layout();
    let mut delta = vec![0isize; spec.dimension()];
    delta[axis] = amount;
    let target: Vec<usize> = (0..spec.num_cells()).map(|x| spec.offset(x, &delta)).collect();
    Ok((0..layout.total_dim())
        .map(|i| {
            let src = layout.digits(i);
            let mut dst = vec![0; src.len()];
            for (x, &t) in target.iter().enumerate() {
                dst[t] = src[x];
            }
            layout.index(&dst)
        })
        .collect())
}

pub fn translation(spec: &TorusSpec, axis: usize, amount: isize) -> Result<DenseOperator> {
    let perm = translation_permutation(spec, axis, amount)?;
    let n = perm.len();
    let mut m = Matrix::zeros((n, n));
    for (c, &r) in perm.iter().enumerate() {
        m[[r, c]] = Complex64::new(1.0, 0.0);
    }
    DenseOperator::new(spec.layout(), m)
}

/// The right shift `c'_x = c_{x−1}` on a ring.
pub fn make_shift_qca(spec: &TorusSpec) -> Result<DenseOperator> {
    require_1d(spec)?;
    translation(spec, 0, 1)
}

/// Largest `‖G·T − T·G‖` (max-entry) over translations `T` by `stride` along
/// each axis.
pub fn verify_shift_invariance(g: &DenseOperator, spec: &TorusSpec, stride: usize, tol: f64) -> Result<(bool, f64)> {
    let n = spec.layout().total_dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let m = g.matrix();
    let mut worst = 0.0f64;
    for axis in 0..spec.dimension() {
        // G commutes with T iff G[p(r), p(c)] = G[r, c]
        let p = translation_permutation(spec, axis, stride as isize)?;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((m[[p[r], p[c]]] - m[[r, c]]).norm());
            }
        }
    }
    Ok((worst <= tol, worst))
}

/// A partitioned automaton: each stage applies `block` to every cube
/// `o + 2k + {0,1}ⁿ` for the stage's offset `o ∈ {0,1}ⁿ`. Stages run in the
/// listed order.
#[derive(Debug, Clone)]
pub struct PartitionedQca {
    pub unitary: DenseOperator,
    /// Exact light-cone graph: `y ∈ N_x` iff a cube chain connects `x` back to `y`.
    pub graph: QuantumLabeledGraph,
}

pub fn make_partitioned_qca(spec: &TorusSpec, block: &DenseOperator, offsets: &[Vec<usize>]) -> Result<PartitionedQca> {
    if let Some(l) = spec.axes().iter().find(|&&l| l % 2 != 0) {
        return Err(Error::InvalidTorus(format!("partitioning needs even axis lengths, got {l}")));
    }
    let cube = spec.unit_cube();
    let expected = spec.cell_dim.pow(cube.len() as u32);
    if block.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: block.dim(),
        });
    }
    let (ok, residual) = check_unitary(block, 1e-9);
    if !ok {
        return Err(Error::NonUnitary { residual });
    }
    for o in offsets {
        if o.len() != spec.dimension() || o.iter().any(|&b| b > 1) {
            return Err(Error::InvalidSchedule(format!("offset {o:?} is not in {{0,1}}^{}", spec.dimension())));
        }
    }

    // stages[s] = cubes, each listing its cells in cube order
    let stages: Vec<Vec<Vec<usize>>> = offsets.iter().map(|o| stage_cubes(spec, o, &cube)).collect();
    let mut placed = Vec::new();
    for cubes in &stages {
        let mut ops = Vec::with_capacity(cubes.len());
        for cells in cubes {
            let order: Vec<(Slot, usize)> = cells.iter().map(|&c| (Slot::node(c), spec.cell_dim)).collect();
            let local = DenseOperator::from_ordered(&order, block.matrix().clone())?;
            ops.push((local, Support::nodes(cells.iter().copied())));
        }
        placed.push(ops);
    }
    let layout = spec.layout();
    let unitary = operator_from_action(&layout, |s| {
        let mut s = s.clone();
        for (local, support) in placed.iter().flatten() {
            s = apply_on_support(&s, local, support)?;
        }
        Ok(s)
    })?;

    let edges = (0..spec.num_cells()).flat_map(|x| {
        let mut cone = BTreeSet::from([x]);
        // cubes of a stage tile the torus, so the cone only grows
        for cubes in stages.iter().rev() {
            cone = cubes
                .iter()
                .filter(|cells| cells.iter().any(|c| cone.contains(c)))
                .flatten()
                .copied()
                .collect();
        }
        cone.into_iter().map(move |y| (x, y))
    });
    let graph = QuantumLabeledGraph::new(spec.labels(), edges.collect::<Vec<_>>())?;
    Ok(PartitionedQca { unitary, graph })
}

fn stage_cubes(spec: &TorusSpec, offset: &[usize], cube: &[Vec<isize>]) -> Vec<Vec<usize>> {
    let half: Vec<usize> = spec.axes().iter().map(|l| l / 2).collect();
    let count: usize = half.iter().product();
    (0..count)
        .map(|k| {
            let mut rest = k;
            let mut origin = vec![0isize; half.len()];
            for a in (0..half.len()).rev() {
                origin[a] = (2 * (rest % half[a]) + offset[a]) as isize;
                rest /= half[a];
            }
            cube.iter()
                .map(|z| {
                    let c: Vec<isize> = origin.iter().zip(z).map(|(o, d)| o + d).collect();
                    spec.node(&c)
                })
                .collect()
        })
        .collect()
}

/// Checks performed on the assembled doubled-alphabet automaton.
#[derive(Debug, Clone)]
pub struct AutomatonChecks {
    pub unitarity_residual: f64,
    pub shift_deviation: f64,
}

/// `H = (⊗S)(∏K_x)` on the doubled alphabet, with `HE = EG`.
#[derive(Debug, Clone)]
pub struct BlockRepresentation {
    pub doubled_alphabet_dim: usize,
    /// `K_0` with factors ordered `(computed, −z)` for `z ∈ {0,1}ⁿ`, then `(uncomputed, 0)`.
    pub k_block: Matrix,
    /// Origin nodes of the gates in each layer.
    pub layers: Vec<Vec<usize>>,
    pub s_stage: Matrix,
    pub translation_deviation: f64,
    pub he_eg_deviation: f64,
    pub worst_input: String,
    pub inputs_checked: usize,
    /// `None` when the doubled space is too large to materialize.
    pub automaton: Option<AutomatonChecks>,
    pub circuit: Circuit,
    pub report: AssemblyReport,
}

/// Parameters of [`block_representation`].
#[derive(Debug, Clone, Copy)]
pub struct BlockOptions {
    pub tol: f64,
    pub verify_tol: f64,
    pub num_random: usize,
    pub seed: u64,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions {
            tol: crate::localizer::DEFAULT_TOL,
            verify_tol: crate::localizer::DEFAULT_VERIFY_TOL,
            num_random: 20,
            seed: 0,
        }
    }
}

/// Ordered `K_x` support: computed tape at `x − z` for `z ∈ {0,1}ⁿ`, then `x` uncomputed.
fn relative_order(spec: &TorusSpec, x: usize) -> Vec<Slot> {
    let mut order: Vec<Slot> = spec
        .unit_cube()
        .iter()
        .map(|z| {
            let neg: Vec<isize> = z.iter().map(|d| -d).collect();
            Slot::new(COMPUTED, spec.offset(x, &neg))
        })
        .collect();
    order.push(Slot::new(UNCOMPUTED, x));
    order
}

fn swap_block(d: usize) -> Matrix {
    let mut m = Matrix::zeros((d * d, d * d));
    for a in 0..d {
        for b in 0..d {
            m[[b * d + a, a * d + b]] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

pub fn block_representation(g: &DenseOperator, spec: &TorusSpec, opts: &BlockOptions) -> Result<BlockRepresentation> {
    let (invariant, deviation) = verify_shift_invariance(g, spec, 1, opts.tol)?;
    if !invariant {
        return Err(Error::NotShiftInvariant { deviation });
    }
    let graph = make_torus_graph(spec);
    let Assembly { circuit, report } = assemble(g, &graph, opts.tol, &Schedule::TorusOffsets(spec.axes().to_vec()))?;
    let expected_layers = 1usize << spec.dimension();
    if circuit.layers().len() != expected_layers {
        return Err(Error::InvalidSchedule(format!(
            "expected {expected_layers} layers, got {}",
            circuit.layers().len()
        )));
    }

    let mut blocks = vec![None; spec.num_cells()];
    for gate in circuit.gates() {
        blocks[gate.origin_node] = Some(gate.block.to_ordered(&relative_order(spec, gate.origin_node))?);
    }
    let blocks: Vec<Matrix> = blocks.into_iter().map(|b| b.expect("one gate per node")).collect();
    let k_block = blocks[0].clone();
    let translation_deviation = blocks.iter().map(|b| block_distance(b, &k_block)).fold(0.0, f64::max);
    if translation_deviation > opts.tol {
        return Err(Error::ShiftInvarianceViolation {
            deviation: translation_deviation,
        });
    }

    let doubled = circuit.doubled();
    let h_apply = |psi: &StateVector| -> Result<StateVector> {
        let mut s = psi.clone();
        for gate in circuit.gates() {
            s = gate.apply(&s)?;
        }
        Ok(doubled.swap_tapes(&s))
    };
    let base = spec.layout();
    let mut inputs: Vec<(String, StateVector)> = (0..base.total_dim())
        .map(|i| Ok((format!("basis {i}"), StateVector::basis(base.clone(), i)?)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 0..opts.num_random {
        inputs.push((format!("random {k}"), StateVector::random(base.clone(), &mut rng)));
    }
    let g_base = g.relabel(base.clone())?;
    let mut worst = (0.0f64, String::from("none"));
    for (name, psi) in &inputs {
        let he = h_apply(&encode(doubled, psi)?)?;
        let eg = encode(doubled, &psi.apply(&g_base)?)?;
        let dev = he.distance(&eg);
        if dev > worst.0 || worst.1 == "none" {
            worst = (dev, name.clone());
        }
    }
    if worst.0 > opts.verify_tol {
        return Err(Error::VerificationFailure {
            deviation: worst.0,
            worst_input: worst.1,
        });
    }

    let automaton = if doubled.layout().total_dim() <= MAX_MATERIALIZED_DIM {
        let h = operator_from_action(doubled.layout(), h_apply)?;
        let (_, unitarity_residual) = check_unitary(&h, opts.tol);
        let dspec = spec.doubled();
        let h = h.relabel(dspec.layout())?;
        let (_, shift_deviation) = verify_shift_invariance(&h, &dspec, 1, opts.tol)?;
        Some(AutomatonChecks {
            unitarity_residual,
            shift_deviation,
        })
    } else {
        None
    };

    Ok(BlockRepresentation {
        doubled_alphabet_dim: spec.cell_dim * spec.cell_dim,
        k_block,
        layers: circuit
            .layers()
            .iter()
            .map(|l| l.iter().map(|gate| gate.origin_node).collect())
            .collect(),
        s_stage: swap_block(spec.cell_dim),
        translation_deviation,
        he_eg_deviation: worst.0,
        worst_input: worst.1,
        inputs_checked: inputs.len(),
        automaton,
        circuit,
        report,
    })
}
