use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 alleles, got {0}")]
    TooFewAlleles(usize),

    #[error("allele {index} has non-positive frequency {value}")]
    NonPositiveFrequency { index: usize, value: f64 },

    #[error("allele {index} has non-finite frequency")]
    NonFiniteFrequency { index: usize },

    #[error("frequencies sum to {sum}, deviating from 1 by {deviation:.3e} (tolerance {tolerance:e})")]
    SumMismatch {
        sum: f64,
        deviation: f64,
        tolerance: f64,
    },

    #[error("could not parse {token:?} as a frequency")]
    BadToken { token: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("selection matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pool was built without retaining draws; the general selection model needs them")]
    DrawsNotRetained,

    #[error(
        "rejection sampler starved: acceptance rate {rate:.3e} after {proposals} proposals; \
         lower the switch threshold to use Metropolis-Hastings"
    )]
    RejectionStarved { rate: f64, proposals: u64 },

    #[error("invalid study spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("malformed pool file at line {line}: {reason}")]
    MalformedPool { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
