use thiserror::Error;

/// Errors raised by the estimators, samplers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty after dropping incomplete pairs")]
    EmptySample,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite observation at index {0}")]
    NonFinite(usize),

    #[error("functional `{0}` cannot be fitted from a sample")]
    UnsupportedFunctional(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("level {0} outside (0, 1)")]
    LevelOutOfRange(f64),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no tail level has at least {min_count} expected observations")]
    InsufficientTailData { min_count: usize },

    #[error("region contains no breakpoint cell")]
    EmptyRegion,

    #[error("target Spearman rho {target} is not attainable by this family")]
    TargetUnattainable { target: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
