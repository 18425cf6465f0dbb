use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Input(String),
    /// An internal invariant did not hold; indicates a bug, not bad data.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A numerical guard rejected the request (aliasing, non-finite values).
    #[error("numeric guard: {0}")]
    Numeric(String),
    /// An assertion embedded in an experiment suite failed.
    #[error("suite assertion failed: {0}")]
    Suite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Input(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Invariant(_) => 3,
            Error::Numeric(_) => 4,
            Error::Suite(_) => 5,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
