use thiserror::Error;

/// Failures raised by the approximation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("size {size} exceeds cap {cap}")]
    Overflow { size: u128, cap: u128 },

    #[error("gram factorization failed even with jitter {jitter:e}")]
    Factorization { jitter: f64 },

    #[error("quadrature did not converge: relative two-resolution difference {rel_diff:e}")]
    NonConvergence { rel_diff: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("insufficient spectrum: {0}")]
    InsufficientSpectrum(String),

    #[error("non-positive eigenvalue tail at n = {n}")]
    NegativeTail { n: usize },

    #[error("insufficient data for fit: {0}")]
    InsufficientSpan(String),

    #[error("epsilon {epsilon:e} is below the smallest achieved error {best:e}")]
    EpsilonUnreachable { epsilon: f64, best: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::DimensionMismatch { .. }
                | Error::LengthMismatch { .. }
                | Error::Config(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
