use thiserror::Error;

/// Errors raised by the solvers, estimators and generators in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unsupported order p = {0}: this routine requires an odd integer p >= 3")]
    UnsupportedOrder(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("power iteration did not converge after {applications} operator applications")]
    ConvergenceFailure {
        applications: usize,
        /// Best orthonormal block found before the cap was hit.
        partial: Vec<Vec<f64>>,
    },

    #[error("time budget exhausted after {iterations} iterations")]
    DeadlineExceeded { iterations: usize },

    #[error("every item was removed by preprocessing; the instance is infeasible at this accuracy")]
    InfeasibleAfterPreprocessing,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("matrix of dimension {dim} exceeds the dense cap {cap}; use the operator form")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
