use alloc::string::String;

/// Errors raised by metric computations and by the in-memory containers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("corpus contains no sentences")]
    EmptyCorpus,
    #[error("invalid gram order {0}: must be at least 1")]
    InvalidOrder(usize),
    #[error("n-gram profiles have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("candidate sentence is empty")]
    EmptyCandidate,
    #[error("self-BLEU needs at least 2 sentences, got {0}")]
    TooFewSentences(usize),
    #[error("need at least {needed} feature rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,
    #[error("log-prob table has no records with origin {0}")]
    MissingOrigin(char),
    #[error("non-finite log-density in record {index} ({sample_id})")]
    NonFiniteLogProb { index: usize, sample_id: String },
    #[error("record {index} ({sample_id}) has no usable token length")]
    MissingLength { index: usize, sample_id: String },
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations for a correlation, got {0}")]
    TooFewObservations(usize),
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(String),
    #[error("unknown metric `{0}`: no direction rule registered")]
    UnknownMetric(String),
    #[error("report `{run_id}` is missing metric `{metric}`")]
    MissingMetric { run_id: String, metric: String },
    #[error("duplicate metric `{0}`")]
    DuplicateMetric(String),
    #[error("metric `{0}` has a non-finite value")]
    NonFiniteMetric(String),
}

pub type Result<T> = core::result::Result<T, Error>;
