//! Verification suites, configuration and report emission behind `sp4cert`.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Format, RunConfig};
pub use report::{Record, Skipped, SuiteReport};
pub use suites::{run_suites, Suite, TableRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}
