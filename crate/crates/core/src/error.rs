use thiserror::Error;

/// Errors raised by the algebra, chain and evolution routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),

    #[error("degenerate loop constant k = {k} (k must exceed 2 for a real rapidity parameter)")]
    DegenerateLoopConstant { k: f64 },

    #[error("pole at rapidity {re}{im:+}i: |sinh(eta + theta)| vanishes")]
    PoleAtRapidity { re: f64, im: f64 },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("site {site} out of range for a chain of length {length}")]
    SiteOutOfRange { site: usize, length: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("ill-conditioned polynomial fit (condition number {condition:e})")]
    IllConditionedFit { condition: f64 },

    #[error("no closed form available for {0}")]
    UnsupportedSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
