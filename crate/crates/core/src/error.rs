use thiserror::Error;

/// Errors raised by the library.
///
/// Domain errors (bad input, exhausted budgets) are kept separate from
/// `Verification`, which signals that a checked identity did not hold.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size set: {0}")]
    InvalidSizeSet(String),

    #[error("invalid series description: {0}")]
    InvalidSpec(String),

    #[error("horizon {horizon} is below the largest explicit element {largest}")]
    HorizonTooSmall { horizon: u64, largest: u64 },

    #[error("spec is not odd-ended; {0}")]
    NotOddEnded(String),

    #[error("enumeration budget exceeded: {count} objects, cap is {cap}")]
    BudgetExceeded { count: String, cap: u128 },

    #[error("invalid ordered set partition: {0}")]
    InvalidPartition(String),

    #[error("block of size {size} is not admissible: {reason}")]
    InadmissibleBlock { size: usize, reason: String },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSizeSet(_) => "invalid_size_set",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::HorizonTooSmall { .. } => "horizon_too_small",
            Error::NotOddEnded(_) => "not_odd_ended",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::InadmissibleBlock { .. } => "inadmissible_block",
            Error::InvalidSeries(_) => "invalid_series",
            Error::Precondition(_) => "precondition",
            Error::Verification(_) => "verification",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
