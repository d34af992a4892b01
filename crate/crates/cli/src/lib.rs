//! Serialization and command implementations behind the `qlocal` binary.

pub mod commands;
pub mod format;
pub mod report;
