use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("form is not stable: {0}")]
    Stability(String),
    #[error("positivity failure: {0}")]
    Positivity(String),
    #[error("compatibility failure: residual {residual:.3e} exceeds {tolerance:.1e}")]
    Compatibility { residual: f64, tolerance: f64 },
    #[error("inconsistent jet: {0}")]
    JetInconsistency(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("flow left the positive half-line at t = {time}")]
    BlowUp { time: f64 },
    #[error("differential of generator `{0}` is not defined by the rule set")]
    Incompleteness(String),
    #[error("branching failed: {0}")]
    Branching(String),
}

pub type Result<T> = std::result::Result<T, Error>;
