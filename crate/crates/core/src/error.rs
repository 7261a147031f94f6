use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("negative entry in {0}")]
    NegativeEntry(&'static str),

    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("invalid run at step {step}: {reason}")]
    InvalidRun { step: usize, reason: String },

    #[error("invalid section: {0}")]
    InvalidSection(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
