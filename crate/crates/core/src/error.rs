use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of an arithmetic function or sum.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation past the last value a finite table can supply.
    #[error("argument {n} exceeds horizon {horizon}")]
    Horizon { n: u64, horizon: u64 },

    /// A parameter tuple violates a hypothesis surrogate.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// An operation-level precondition failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("grid produced no valid tuples")]
    EmptyGrid,

    /// A counting inequality that must hold by construction did not.
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
