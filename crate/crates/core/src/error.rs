use thiserror::Error;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Data pathologies that make an estimate undefined at a given `k`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("no uncensored extreme observations among the top {k}")]
    NoUncensoredExtremes { k: usize },
    #[error("estimated tail index {gamma1_hat} >= 1; infinite-mean regime")]
    InfiniteMean { gamma1_hat: f64 },
    #[error("all {reps} replications failed at k = {k}")]
    AllReplicationsFailed { k: usize, reps: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Estimation(#[from] EstimationError),

    /// A numerical routine did not reach its tolerance.
    #[error("numeric error: {what} (estimate {estimate:e}, error bound {error_bound:e}, {evaluations} evaluations)")]
    Numeric {
        what: String,
        estimate: f64,
        error_bound: f64,
        evaluations: usize,
    },

    /// Malformed input data; `line` is 1-based and counts the header.
    #[error("invalid input at line {line}: {message}")]
    Input { line: u64, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) | Error::Input { .. } => "validation",
            Error::Estimation(_) => "estimation",
            Error::Numeric { .. } => "numeric",
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => "io",
        }
    }
}
