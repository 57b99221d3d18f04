use thiserror::Error;

/// Errors raised by the lab. Each variant maps onto a CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 validation, 3 resource cap, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_check(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension(format!(
            "{what}: expected {expected}, got {got}"
        )));
    }
    Ok(())
}
