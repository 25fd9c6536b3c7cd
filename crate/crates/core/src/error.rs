//! Error type shared by all analysis modules.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("price at index {index} is not positive (got {value})")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("timestamps must be strictly increasing (violation at index {index})")]
    UnorderedTimestamps { index: usize },

    #[error("timestamp count {timestamps} does not match price count {prices}")]
    TimestampLengthMismatch { timestamps: usize, prices: usize },

    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("returns are already demeaned")]
    AlreadyDemeaned,

    #[error("returns must be demeaned first")]
    NotDemeaned,

    #[error("zero dispersion in {context}")]
    ZeroDispersion { context: &'static str },

    #[error("empty sample set")]
    EmptySamples,

    #[error("probability grids differ; operands must share one binning")]
    GridMismatch,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value at index {index} in {context}")]
    NonFinite { context: &'static str, index: usize },

    #[error("largest lag {lag} too large for series of length {len}")]
    LagTooLarge { lag: usize, len: usize },

    #[error("degenerate moments: fewer than {required} usable scales for q = {q}")]
    DegenerateMoments { q: f64, required: usize },

    #[error("q = {q} missing from the moment grid")]
    MissingGridPoint { q: f64 },

    #[error("conditioning subset too small: {actual} points, need {required}")]
    ConditioningTooSmall { actual: usize, required: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
