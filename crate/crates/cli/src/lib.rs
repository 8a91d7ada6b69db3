//! Library behind the `arbor` command: suites, the check runner, reports
//! and the on-disk quotient cache.

pub mod cache;
pub mod commands;
pub mod report;
pub mod run;
pub mod suite;

use std::fmt;

pub use cache::DiskCache;
pub use report::{Basis, Outcome, RunReport};
pub use run::{load_tower, Runner};
pub use suite::{CheckSpec, Kind, Suite};

/// Failures that stop a command before any report exists. All map to exit
/// code 2.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable files or malformed suites.
    Usage(String),
    /// Group files or expressions that do not parse or resolve.
    Input(String),
    Core(arbor::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<arbor::Error> for CliError {
    fn from(e: arbor::Error) -> Self {
        CliError::Core(e)
    }
}
