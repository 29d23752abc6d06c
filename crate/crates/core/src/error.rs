use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("collinear predictors: column(s) {} linearly dependent on earlier columns", .columns.join(", "))]
    CollinearPredictors { columns: Vec<String> },

    #[error("insufficient observations: need at least {required}, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown factor '{0}'")]
    UnknownFactor(String),

    #[error("models are not nested: {0}")]
    NotNested(String),

    #[error("missing groups: {}", .0.join(", "))]
    MissingGroups(Vec<String>),

    #[error("incomplete grid, missing cells: {}", .0.join("; "))]
    IncompleteGrid(Vec<String>),

    #[error("non-monotone timestamps at sample {index}")]
    NonMonotoneTimestamps { index: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed log at line {line}: {message}")]
    MalformedLog { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("failed to converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
