//! Dense complex linear algebra over tensor products of node spaces.
//!
//! Every space is described by a [`SpaceLayout`]: an ordered list of
//! (tape, node) slots with their dimensions. Slots are kept in canonical
//! order (ascending node, then tape) and basis indices are mixed-radix with
//! the first slot most significant.

mod layout;
mod operator;
mod ops;
mod state;

pub use layout::{IndexSplit, Slot, SpaceLayout, Support, COMPUTED, UNCOMPUTED};
pub use operator::{DenseOperator, Matrix};
pub use ops::{
    apply_on_support, check_unitary, embed, extract_local_block, is_localized, partial_trace,
    random_unitary, random_unitary_matrix,
};
pub use state::{DensityMatrix, StateVector};

pub(crate) use operator::max_abs_diff;

use num_complex::Complex64;

/// Single-qudit matrix unit `|i⟩⟨j|`.
pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros((dim, dim));
    m[[i, j]] = Complex64::new(1.0, 0.0);
    m
}

/// Builds the full matrix of a linear map from its action on basis vectors.
pub fn operator_from_action<F>(layout: &SpaceLayout, apply: F) -> crate::Result<DenseOperator>
where
    F: Fn(&StateVector) -> crate::Result<StateVector>,
{
    let n = layout.total_dim();
    let mut m = Matrix::zeros((n, n));
    for c in 0..n {
        let out = apply(&StateVector::basis(layout.clone(), c)?)?;
        for (r, z) in out.amplitudes().iter().enumerate() {
            m[[r, c]] = *z;
        }
    }
    DenseOperator::new(layout.clone(), m)
}

/// Max-entry norm of `[a, b]`.
pub fn commutator_norm(a: &DenseOperator, b: &DenseOperator) -> crate::Result<f64> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Ok(max_abs_diff(ab.matrix(), ba.matrix()).expect("equal sides"))
}
