use thiserror::Error;

/// Errors raised by the numerical kernels, generators and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("eigenvalue {index} is degenerate (gap {gap:e}); reconstruction is not unique")]
    Degenerate { index: usize, gap: f64 },

    #[error("operator has zero Frobenius norm")]
    ZeroOperator,

    #[error("zero coefficient vector")]
    ZeroVector,

    #[error("measurement a[{index}] = {value} lies outside the numerical range [{low}, {high}] of its operator")]
    InconsistentMeasurement {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid configuration field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("measurement record carries no ground-truth data")]
    MissingTruth,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
