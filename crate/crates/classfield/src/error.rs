use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("pole: {0}")]
    Pole(String),
}

pub type Result<T> = std::result::Result<T, Error>;
