use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid date {value:?}: expected YYYY-MM-DD")]
    InvalidDate { value: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("vocabulary is empty: no token passed the min-count filter")]
    EmptyVocabulary,

    #[error("invalid distribution for {id:?}: {reason}")]
    InvalidDistribution { id: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series of length {n} is too short for window {w}: need n > 2w")]
    SeriesTooShort { n: usize, w: usize },

    #[error("distributions not sorted by (date, id) at position {at}")]
    Unsorted { at: usize },

    #[error("non-finite value in input series at index {at}")]
    NonFinite { at: usize },

    #[error("novelty is constant over the fitted points; slope is undefined")]
    NoveltyConstant,

    #[error("period {period:?} has only {got} defined points; need at least 3")]
    PeriodTooSmall { period: String, got: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
