use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::layout::{SpaceLayout, Support};
use super::operator::{DenseOperator, Matrix};
use super::state::StateVector;
use crate::error::{Error, Result};

fn check_local_dim(local: &DenseOperator, support_dim: usize) -> Result<()> {
    if local.dim() != support_dim {
        return Err(Error::DimensionMismatch {
            expected: support_dim,
            found: local.dim(),
        });
    }
    Ok(())
}

/// `local` on `support`, identity elsewhere, in `full_layout`'s index order.
pub fn embed(local: &DenseOperator, support: &Support, full_layout: &SpaceLayout) -> Result<DenseOperator> {
    let split = full_layout.split(support)?;
    check_local_dim(local, split.sub.len())?;
    let n = full_layout.total_dim();
    let m = local.matrix();
    let mut out = Array2::<Complex64>::zeros((n, n));
    for &r in &split.rest {
        for (a, &oa) in split.sub.iter().enumerate() {
            for (b, &ob) in split.sub.iter().enumerate() {
                out[[oa + r, ob + r]] = m[[a, b]];
            }
        }
    }
    DenseOperator::new(full_layout.clone(), out)
}

/// Traces out every slot of `op` not in `keep`.
pub fn partial_trace(op: &DenseOperator, keep: &Support) -> Result<DenseOperator> {
    let layout = op.layout().sub_layout(keep)?;
    let split = op.layout().split(keep)?;
    let d = split.sub.len();
    let m = op.matrix();
    let out = Array2::from_shape_fn((d, d), |(a, b)| {
        split
            .rest
            .iter()
            .map(|&r| m[[split.sub[a] + r, split.sub[b] + r]])
            .sum::<Complex64>()
    });
    DenseOperator::new(layout, out)
}

/// Whether `op` is of the form `A_region ⊗ I`.
///
/// Tests commutation with every matrix unit `E_ij` placed on every slot
/// outside `region`; these generate the full algebra of the complement, so
/// the test is exact. Returns the verdict and the largest commutator entry.
pub fn is_localized(op: &DenseOperator, region: &Support, tol: f64) -> Result<(bool, f64)> {
    let layout = op.layout();
    for s in region {
        if layout.position(s).is_none() {
            return Err(Error::UnknownSlot(*s));
        }
    }
    let n = layout.total_dim();
    let m = op.matrix();
    let mut residual = 0.0f64;
    for (p, slot) in layout.slots().iter().enumerate() {
        if region.contains(slot) {
            continue;
        }
        let (d, st) = (layout.dims()[p], layout.strides()[p]);
        let digit: Vec<usize> = (0..n).map(|k| (k / st) % d).collect();
        for i in 0..d {
            for j in 0..d {
                for r in 0..n {
                    let dr = digit[r];
                    for c in 0..n {
                        let dc = digit[c];
                        let am = if dc == j {
                            m[[r, c + i * st - dc * st]]
                        } else {
                            Complex64::default()
                        };
                        let ma = if dr == i {
                            m[[r + j * st - dr * st, c]]
                        } else {
                            Complex64::default()
                        };
                        residual = residual.max((am - ma).norm());
                    }
                }
            }
        }
    }
    Ok((residual <= tol, residual))
}

/// Recovers the local block of a global operator known only through its
/// action on states.
///
/// Column `b` is read off from `apply(|b⟩_support ⊗ |fill⟩_rest)`. Any output
/// weight on basis states that disagree with `fill` off the support means the
/// operator is not localized on `support`; the largest such ℓ2 weight is the
/// returned residual, and exceeding `tol` is an error.
pub fn extract_local_block<F>(
    apply: F,
    support: &Support,
    full_layout: &SpaceLayout,
    fill: &[usize],
    tol: f64,
) -> Result<(DenseOperator, f64)>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    if fill.len() != full_layout.len() {
        return Err(Error::DimensionMismatch {
            expected: full_layout.len(),
            found: fill.len(),
        });
    }
    for (k, (&f, &d)) in fill.iter().zip(full_layout.dims()).enumerate() {
        if f >= d {
            return Err(Error::Invalid(format!(
                "fill index {f} out of range for slot {}",
                full_layout.slots()[k]
            )));
        }
    }
    let sub_layout = full_layout.sub_layout(support)?;
    let split = full_layout.split(support)?;
    let base: usize = full_layout
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| !support.contains(s))
        .map(|(k, _)| fill[k] * full_layout.strides()[k])
        .sum();
    let n = full_layout.total_dim();
    let mut on_fill = vec![false; n];
    for &o in &split.sub {
        on_fill[o + base] = true;
    }
    let d = split.sub.len();
    let mut block = Array2::<Complex64>::zeros((d, d));
    let mut residual = 0.0f64;
    for (b, &ob) in split.sub.iter().enumerate() {
        let input = StateVector::basis(full_layout.clone(), ob + base)?;
        let out = apply(&input)?;
        let amps = out.amplitudes();
        if amps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: amps.len(),
            });
        }
        for (a, &oa) in split.sub.iter().enumerate() {
            block[[a, b]] = amps[oa + base];
        }
        let off: f64 = amps
            .iter()
            .zip(&on_fill)
            .filter(|(_, &on)| !on)
            .map(|(z, _)| z.norm_sqr())
            .sum();
        residual = residual.max(off.sqrt());
    }
    if residual > tol {
        return Err(Error::LocalizationViolation {
            node: None,
            residual,
        });
    }
    Ok((DenseOperator::new(sub_layout, block)?, residual))
}

/// `embed(gate, support) · state`, without forming the full matrix.
pub fn apply_on_support(state: &StateVector, gate: &DenseOperator, support: &Support) -> Result<StateVector> {
    let layout = state.layout();
    let split = layout.split(support)?;
    check_local_dim(gate, split.sub.len())?;
    let g = gate.matrix();
    let src = state.amplitudes();
    let mut out = vec![Complex64::default(); src.len()];
    let mut buf = vec![Complex64::default(); split.sub.len()];
    for &r in &split.rest {
        for (a, &oa) in split.sub.iter().enumerate() {
            buf[a] = src[oa + r];
        }
        for (a, &oa) in split.sub.iter().enumerate() {
            out[oa + r] = g.row(a).iter().zip(&buf).map(|(x, y)| x * y).sum();
        }
    }
    Ok(StateVector::from_parts(layout.clone(), out))
}

/// Verdict and max-entry norm of `op†·op − I`.
pub fn check_unitary(op: &DenseOperator, tol: f64) -> (bool, f64) {
    let residual = unitarity_residual(op.matrix());
    (residual <= tol, residual)
}

pub(crate) fn unitarity_residual(m: &Matrix) -> f64 {
    let gram = m.t().mapv(|z| z.conj()).dot(m);
    gram.indexed_iter()
        .map(|((i, j), z)| {
            if i == j {
                (z - Complex64::new(1.0, 0.0)).norm()
            } else {
                z.norm()
            }
        })
        .fold(0.0, f64::max)
}

/// Haar-distributed unitary from a seeded complex Gaussian matrix.
pub fn random_unitary(dim: usize, seed: u64) -> Result<DenseOperator> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseOperator::square(random_unitary_matrix(dim, &mut rng))
}

/// Gram–Schmidt (with one reorthogonalization pass) on Gaussian columns.
/// The implied R has a positive real diagonal, which makes the law of Q Haar.
pub fn random_unitary_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let mut q = Array2::from_shape_fn((dim, dim), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    for k in 0..dim {
        for _ in 0..2 {
            for j in 0..k {
                let proj: Complex64 = (0..dim).map(|i| q[[i, j]].conj() * q[[i, k]]).sum();
                for i in 0..dim {
                    let qij = q[[i, j]];
                    q[[i, k]] -= proj * qij;
                }
            }
        }
        let norm = (0..dim).map(|i| q[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            q[[i, k]] /= norm;
        }
    }
    q
}
