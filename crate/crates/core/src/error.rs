use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("operation not supported by the {backend} backend: {what}")]
    UnsupportedBackend { backend: String, what: String },
    #[error("wrong characteristic: {0}")]
    WrongCharacteristic(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("budget exceeded: {needed} > {budget} ({hint})")]
    Budget { needed: u128, budget: u128, hint: String },
    #[error("power iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    Convergence { residual: f64, iterations: usize },
    #[error("hypothesis violated at {at}: {condition}")]
    Hypothesis { at: String, condition: String },
    #[error("no admissible move from {0}")]
    Path(String),
    #[error("inadmissible exponent: {0}")]
    Admissibility(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
