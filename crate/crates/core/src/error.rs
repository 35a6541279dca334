use thiserror::Error;

/// Library-wide error type.
///
/// The variants map onto the CLI exit codes: `InvalidGraph` and
/// `InvalidInput` are malformed input (exit 2), `Precondition` is a violated
/// operation precondition (exit 3), `ResourceCap` is a tripped resource
/// guard (exit 4). `Internal` signals a broken invariant that the theory
/// rules out; it must never surface on valid input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_graph(msg: impl Into<String>) -> Self {
        Error::InvalidGraph(msg.into())
    }
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn resource_cap(msg: impl Into<String>) -> Self {
        Error::ResourceCap(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
