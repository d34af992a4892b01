use thiserror::Error;

use crate::tensor::Slot;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("slot {0} is not part of the layout")]
    UnknownSlot(Slot),

    #[error("slot {0} appears more than once")]
    DuplicateSlot(Slot),

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("invalid node id {0}")]
    InvalidNode(usize),

    #[error("quiescent index {quiescent} out of range for node {node} of dimension {dim}")]
    InvalidQuiescent {
        node: usize,
        dim: usize,
        quiescent: usize,
    },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("operator is not unitary (residual {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("operator is not localized on the requested support (residual {residual:e}{})",
        node.map(|n| format!(", node {n}")).unwrap_or_default())]
    LocalizationViolation { node: Option<usize>, residual: f64 },

    #[error("local block at node {node} is not unitary (residual {residual:e})")]
    NonUnitaryBlock { node: usize, residual: f64 },

    #[error("representation check failed: deviation {deviation:e} on input {worst_input}")]
    VerificationFailure { deviation: f64, worst_input: String },

    #[error("operator does not commute with translations (deviation {deviation:e})")]
    NotShiftInvariant { deviation: f64 },

    #[error("local blocks differ across translations (deviation {deviation:e})")]
    ShiftInvarianceViolation { deviation: f64 },

    #[error("invalid torus: {0}")]
    InvalidTorus(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
