//! Error type shared by the whole crate.

/// Errors reported by the analysis routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An exhaustive search would exceed the configured budget.
    #[error("search budget exceeded: {candidates} candidate sets > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    /// A numerical routine failed (non-finite input, factorization breakdown).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
