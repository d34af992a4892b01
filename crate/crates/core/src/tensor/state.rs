use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::{SpaceLayout, Support};
use super::operator::{DenseOperator, Matrix};
use crate::error::{Error, Result};

/// Amplitudes over the basis of `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SpaceLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(layout: SpaceLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: amps.len(),
            });
        }
        if let Some(pos) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(StateVector { layout, amps })
    }

    /// Like [`StateVector::new`], but also requires unit norm within 1e-9.
    pub fn normalized(layout: SpaceLayout, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::new(layout, amps)?;
        let n = s.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("state norm {n} is not 1")));
        }
        Ok(s)
    }

    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        let n = layout.total_dim();
        if index >= n {
            return Err(Error::Invalid(format!("basis index {index} out of range {n}")));
        }
        let mut amps = vec![Complex64::default(); n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    /// Normalized complex Gaussian vector.
    pub fn random<R: Rng + ?Sized>(layout: SpaceLayout, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..layout.total_dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        StateVector { layout, amps }
    }

    pub(crate) fn from_parts(layout: SpaceLayout, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(layout.total_dim(), amps.len());
        StateVector { layout, amps }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ℓ2 distance; infinite when the dimensions differ.
    pub fn distance(&self, other: &StateVector) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Full-space matrix applied to this state.
    pub fn apply(&self, op: &DenseOperator) -> Result<StateVector> {
        if op.dim() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: op.dim(),
            });
        }
        let m = op.matrix();
        let amps = (0..m.nrows())
            .map(|i| m.row(i).iter().zip(&self.amps).map(|(a, b)| a * b).sum())
            .collect();
        Ok(StateVector {
            layout: self.layout.clone(),
            amps,
        })
    }

    /// Reduced density matrix of |self⟩⟨self| on `keep`.
    pub fn reduced(&self, keep: &Support) -> Result<DensityMatrix> {
        let sub_layout = self.layout.sub_layout(keep)?;
        let split = self.layout.split(keep)?;
        let d = split.sub.len();
        let mut out = Array2::<Complex64>::zeros((d, d));
        for &r in &split.rest {
            for (a, &oa) in split.sub.iter().enumerate() {
                let va = self.amps[oa + r];
                if va == Complex64::default() {
                    continue;
                }
                for (b, &ob) in split.sub.iter().enumerate() {
                    out[[a, b]] += va * self.amps[ob + r].conj();
                }
            }
        }
        Ok(DensityMatrix {
            layout: sub_layout,
            matrix: out,
        })
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: Matrix,
}

impl DensityMatrix {
    pub const TOL: f64 = 1e-9;

    pub fn new(layout: SpaceLayout, matrix: Matrix) -> Result<Self> {
        let op = DenseOperator::new(layout, matrix)?;
        let m = op.matrix();
        let herm = m
            .iter()
            .zip(m.t().iter())
            .map(|(a, b)| (a - b.conj()).norm())
            .fold(0.0, f64::max);
        if herm > Self::TOL {
            return Err(Error::Invalid(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = op.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > Self::TOL {
            return Err(Error::Invalid(format!("density matrix trace {tr} is not 1")));
        }
        if !cholesky_succeeds(m, Self::TOL) {
            return Err(Error::Invalid("density matrix has a negative eigenvalue".into()));
        }
        let (layout, matrix) = (op.layout().clone(), op.into_matrix());
        Ok(DensityMatrix { layout, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let a = &state.amps;
        let n = a.len();
        DensityMatrix {
            layout: state.layout.clone(),
            matrix: Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j].conj()),
        }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn as_operator(&self) -> DenseOperator {
        DenseOperator::new(self.layout.clone(), self.matrix.clone())
            .expect("density matrices are valid operators")
    }

    /// Max-entry distance; infinite when shapes differ.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        super::operator::max_abs_diff(&self.matrix, &other.matrix).unwrap_or(f64::INFINITY)
    }
}

/// Cholesky of `m + shift·I`; succeeds iff the smallest eigenvalue exceeds `-shift`
/// (up to rounding).
fn cholesky_succeeds(m: &Matrix, shift: f64) -> bool {
    let n = m.nrows();
    let mut l = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let mut diag = m[[j, j]].re + shift;
        for k in 0..j {
            diag -= l[[j, k]].norm_sqr();
        }
        if diag <= 0.0 {
            return false;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = m[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = s / ljj;
        }
    }
    true
}
