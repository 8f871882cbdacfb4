use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module. Each maps to a CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid construction parameters (even or composite p, zero degree, ...).
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An operation was called outside its domain (zero has no logarithm, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The supplied data is not consistent with any admissible object.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    /// A configured scale cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A bounded search finished without a result.
    #[error("not found: {0}")]
    NotFound(String),
    /// The requested variant is outside the supported parameter range.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Domain(_) | Error::Unsupported(_) => 3,
            Error::Inconsistent(_) => 4,
            Error::Resource(_) | Error::NotFound(_) => 5,
            Error::Internal(_) => 6,
        }
    }
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
