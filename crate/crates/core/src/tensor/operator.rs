use ndarray::Array2;
use num_complex::Complex64;

use super::layout::{mixed_radix_offsets, Slot, SpaceLayout};
use crate::error::{Error, Result};

pub type Matrix = Array2<Complex64>;

/// Square complex matrix acting on the space described by `layout`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    layout: SpaceLayout,
    matrix: Matrix,
}

impl DenseOperator {
    pub fn new(layout: SpaceLayout, matrix: Matrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        if let Some(pos) = matrix.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(DenseOperator { layout, matrix })
    }

    /// Single-factor operator; the layout is one anonymous slot of side `matrix.nrows()`.
    pub fn square(matrix: Matrix) -> Result<Self> {
        let layout = SpaceLayout::flat(matrix.nrows())?;
        Self::new(layout, matrix)
    }

    /// Row-major construction from a flat slice of entries.
    pub fn from_rows(layout: SpaceLayout, entries: &[Complex64]) -> Result<Self> {
        let n = layout.total_dim();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let matrix = Array2::from_shape_vec((n, n), entries.to_vec())
            .expect("shape checked above");
        Self::new(layout, matrix)
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        DenseOperator {
            layout,
            matrix: Array2::eye(n),
        }
    }

    /// Operator given with its factors listed in `order` (first most significant),
    /// rewritten into the canonical layout of those slots.
    pub fn from_ordered(order: &[(Slot, usize)], matrix: Matrix) -> Result<Self> {
        let layout = SpaceLayout::new(order.iter().copied())?;
        let op = DenseOperator::new(layout.clone(), matrix)?;
        // canonical position k holds listed factor perm[k]
        let perm: Vec<usize> = layout
            .slots()
            .iter()
            .map(|s| order.iter().position(|e| e.0 == *s).expect("same slot set"))
            .collect();
        let dims: Vec<usize> = order.iter().map(|e| e.1).collect();
        let permuted = permute_factors(&op.matrix, &dims, &perm);
        Ok(DenseOperator {
            layout,
            matrix: permuted,
        })
    }

    /// Matrix with factors listed in `order` instead of canonical order.
    pub fn to_ordered(&self, order: &[Slot]) -> Result<Matrix> {
        if order.len() != self.layout.len() {
            return Err(Error::DimensionMismatch {
                expected: self.layout.len(),
                found: order.len(),
            });
        }
        let mut perm = Vec::with_capacity(order.len());
        for s in order {
            let p = self.layout.position(s).ok_or(Error::UnknownSlot(*s))?;
            if perm.contains(&p) {
                return Err(Error::DuplicateSlot(*s));
            }
            perm.push(p);
        }
        Ok(permute_factors(&self.matrix, self.layout.dims(), &perm))
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// Same matrix, reinterpreted on another layout of equal total dimension.
    pub fn relabel(&self, layout: SpaceLayout) -> Result<Self> {
        if layout.total_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: layout.total_dim(),
            });
        }
        Ok(DenseOperator {
            layout,
            matrix: self.matrix.clone(),
        })
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            layout: self.layout.clone(),
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    /// `self · rhs`; keeps `self`'s layout.
    pub fn mul(&self, rhs: &DenseOperator) -> Result<Self> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        Ok(DenseOperator {
            layout: self.layout.clone(),
            matrix: self.matrix.dot(&rhs.matrix),
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum()
    }

    /// Max-entry distance to `other`; `None` when the sides differ.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Option<f64> {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn max_abs_diff(a: &Matrix, b: &Matrix) -> Option<f64> {
    if a.dim() != b.dim() {
        return None;
    }
    Some(
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max),
    )
}

/// Reorders tensor factors: the result's factor `k` is the input's factor `perm[k]`.
pub(crate) fn permute_factors(matrix: &Matrix, dims: &[usize], perm: &[usize]) -> Matrix {
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let map = mixed_radix_offsets(perm.iter().map(|&p| (strides[p], dims[p])));
    let n = map.len();
    Array2::from_shape_fn((n, n), |(i, j)| matrix[[map[i], map[j]]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        let l = SpaceLayout::qudits(&[2]).unwrap();
        assert!(DenseOperator::new(l.clone(), Array2::zeros((3, 3))).is_err());
        let mut m = Array2::<Complex64>::eye(2);
        m[[0, 1]] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(DenseOperator::new(l, m), Err(Error::NonFinite(1)));
    }

    #[test]
    fn from_ordered_matches_swapped_kron() {
        // X on slot b, I on slot a, listed (b, a)
        let x = array![[c(0.), c(1.)], [c(1.), c(0.)]];
        let i2 = Array2::<Complex64>::eye(2);
        let listed = kron(&x, &i2);
        let op = DenseOperator::from_ordered(
            &[(Slot::node(1), 2), (Slot::node(0), 2)],
            listed,
        )
        .unwrap();
        assert_eq!(op.matrix(), &kron(&i2, &x));
        let back = op.to_ordered(&[Slot::node(1), Slot::node(0)]).unwrap();
        assert_eq!(back, kron(&x, &i2));
    }

    fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let (n, m) = (a.nrows(), b.nrows());
        Array2::from_shape_fn((n * m, n * m), |(i, j)| a[[i / m, j / m]] * b[[i % m, j % m]])
    }
}
