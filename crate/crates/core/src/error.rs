use thiserror::Error;

/// Which end of a search bracket failed to straddle a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketEnd {
    /// Mean PRR at the reference distance is not above the upper threshold.
    Near,
    /// Mean PRR at the search limit is not below the lower threshold.
    Far,
}

impl std::fmt::Display for BracketEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BracketEnd::Near => f.write_str("near end (reference distance)"),
            BracketEnd::Far => f.write_str("far end (search limit)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("missing required field `{0}`")]
    MissingField(String),

    #[error("region not bracketed at the {end}: mean PRR {mean} vs threshold {threshold}")]
    NotBracketed { end: BracketEnd, mean: f64, threshold: f64 },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("probabilities do not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("timestamps do not match at sample {index}")]
    TimestampMismatch { index: usize },

    #[error("degenerate feature set: all features are zero")]
    DegenerateFeatures,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
