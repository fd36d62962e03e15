use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("genericity violation: {0}")]
    Genericity(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn generic(msg: impl Into<String>) -> Self {
        Error::Genericity(msg.into())
    }

    /// Process exit code: 2 invalid input, 3 genericity, 4 dimensions, 5 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Genericity(_) => 3,
            Error::DimensionMismatch(_) => 4,
            Error::Budget(_) => 5,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
