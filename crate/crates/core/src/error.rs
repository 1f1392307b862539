use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The instance is larger than the operation is willing to handle.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A value that must be invertible modulo `modulus` is not.
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: String, modulus: u64 },

    /// A documented precondition of a construction does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An input system does not have the required structure.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A proven construction produced an invalid result.
    #[error("internal invariant failure: {0}")]
    Defect(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
