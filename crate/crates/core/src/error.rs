use thiserror::Error;

/// Errors raised by the census library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An exact integer computation left the configured width.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// The input violates a precondition of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds a resource guard.
    #[error("resource guard: {0}")]
    Resource(String),

    /// The operation does not support this combination of inputs.
    #[error("unsupported: {0}")]
    Capability(String),

    /// Factorization of a discriminant did not complete.
    #[error("factorization failed for {0}")]
    Factorization(String),

    /// Malformed textual input (filters, cache files, ranges).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
