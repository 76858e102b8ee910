//! Crate-wide error type.

/// Errors surfaced by the measures, solvers, data generators and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input vector is identically zero; normalized measures are undefined.
    #[error("input vector is identically zero")]
    ZeroVector,
    #[error("scale constant must be positive (got {0})")]
    NonPositiveScale(f64),
    #[error("smoothing parameter must be positive (got {0})")]
    NonPositiveEps(f64),
    #[error("sparsity level {k} out of range for dimension {n}")]
    BadK { k: usize, n: usize },
    #[error("entropy order alpha must be nonnegative (got {0})")]
    BadAlpha(f64),
    #[error("row correlation must lie in [0, 1) (got {0})")]
    BadCorrelation(f64),
    #[error("RIP order {s} out of range for {n} columns")]
    BadOrder { s: usize, n: usize },
    #[error("restricted isometry constant must lie in (0, 1) (got {0})")]
    BadDelta(f64),
    #[error("no restricted isometry constant below 1 is available")]
    DeltaUnavailable,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("objective or gradient became non-finite")]
    NonFiniteObjective,
    #[error("iterate collapsed to the zero vector; the scale C is undefined")]
    ZeroIterate,
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("image format error: {0}")]
    ImageFormat(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("manifest error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 input error, 3 solver failure,
    /// 4 internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFiniteObjective | Error::ZeroIterate | Error::DeltaUnavailable => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
