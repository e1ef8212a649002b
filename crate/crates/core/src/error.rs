use thiserror::Error;

/// Errors produced by series construction, diagnostics, estimation and
/// forecasting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("timestamps must be strictly increasing (violation at index {0})")]
    NonIncreasingTimestamps(usize),
    #[error("load value at index {index} is not strictly positive: {value}")]
    NonPositiveLevel { index: usize, value: f64 },
    #[error("series too short: {got} observations, need at least {need}")]
    SeriesTooShort { got: usize, need: usize },
    #[error("hourly grid violated at index {0}: gap or irregular spacing")]
    IrregularGrid(usize),
    #[error("holdout {holdout} out of range for series of length {len}")]
    HoldoutOutOfRange { holdout: usize, len: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,

    #[error("constant series: regression is singular")]
    ConstantSeries,
    #[error("singular regression matrix")]
    SingularMatrix,
    #[error("lags {lags} invalid for series of length {len}")]
    InvalidLags { lags: usize, len: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("probability {0} outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("non-finite argument: {0}")]
    NonFiniteArgument(f64),

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-finite log-likelihood")]
    NonFiniteLikelihood,
    #[error("AR polynomial has a root on or inside the unit circle")]
    NonStationary,

    #[error("insufficient data: {got} observations, need at least {need}")]
    InsufficientData { got: usize, need: usize },
    #[error("all candidates failed to fit: {0}")]
    AllCandidatesFailed(String),

    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("coverage {0} outside (0, 1)")]
    CoverageOutOfRange(f64),

    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
