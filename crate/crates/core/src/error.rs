use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear program has no constraints or bounds")]
    EmptyProgram,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("operands belong to different models ({left} vs {right})")]
    ModelMismatch { left: String, right: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid effect: {0}")]
    InvalidEffect(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid epsilon: {0}")]
    InvalidEpsilon(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (< {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("contradiction detected: {0}")]
    ContradictionDetected(String),

    #[error("parameter grid has no admissible points: {0}")]
    EmptyGrid(String),

    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),

    /// An LP that must be feasible and bounded by construction was not.
    #[error("solver inconsistency: {0}")]
    Solver(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
