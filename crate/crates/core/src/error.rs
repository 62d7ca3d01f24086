use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("query at {query} exceeds horizon {horizon}")]
    HorizonExceeded { query: u64, horizon: u64 },

    #[error("{0} is not a member of the set")]
    NotAMember(u64),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid set literal: {0}")]
    InvalidLiteral(String),

    #[error("representation too large: {0}")]
    Capacity(String),

    #[error("inference failure: {0}")]
    InferenceFailure(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
