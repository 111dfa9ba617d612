use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("point is not in the polytope: {0}")]
    OutsidePolytope(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index mismatch: expected {expected} entries, found {found}")]
    IndexMismatch { expected: usize, found: usize },

    #[error("ranking is not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("Gröbner basis is truncated; a complete basis is required")]
    Truncated,

    #[error("Gröbner basis is not reduced")]
    NotReduced,

    #[error("no flow exists: {0}")]
    Infeasible(String),

    #[error("internal identity check failed: {0}")]
    IdentityFailure(String),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
