use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("line {line}, column `{column}`: {message}")]
    Row {
        line: u64,
        column: String,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
