//! Certification of causal unitaries on quantum labeled graphs and their
//! compilation into local circuits.

pub mod causality;
mod error;
pub mod graph;
pub mod localizer;
pub mod qca;
pub mod tensor;
pub mod zoo;

pub use error::{Error, Result};
