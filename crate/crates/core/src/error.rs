use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent preferences: {0}")]
    Inconsistent(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("matching is not stable: {0}")]
    Unstable(String),

    #[error("instance must be complete with equal sides: {0}")]
    NotComplete(String),

    #[error("rotation is not exposed: {0}")]
    NotExposed(String),

    #[error("not a downset: {0}")]
    NotDownset(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("invalid path decomposition: {0}")]
    Decomposition(String),

    #[error("invalid coloring: {0}")]
    Coloring(String),

    #[error("labels missing or ambiguous: {0}")]
    Labels(String),

    #[error("attribute profiles induce a tie: {0}")]
    Tie(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
