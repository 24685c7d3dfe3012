//! File formats, run reports and subcommand drivers for the `monocube` binary.

pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use error::{CliError, CliResult};
