use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rule not applicable: {0}")]
    RuleInapplicable(String),

    #[error("cohomology obstruction: {0}")]
    Obstruction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
