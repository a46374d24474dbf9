use thiserror::Error;

/// Errors raised by state construction and measure evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for {count} subsystems")]
    OutOfRange { index: usize, count: usize },

    #[error("truncation too small: tail mass {tail:.3e} exceeds tolerance {tol:.1e}")]
    Truncation { tail: f64, tol: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("unknown block label `{0}`")]
    UnknownLabel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
