use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller supplied values outside an operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An exactness or consistency assertion failed during a computation.
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    /// A value does not fit the fixed-width arithmetic of a fast path.
    #[error("overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
