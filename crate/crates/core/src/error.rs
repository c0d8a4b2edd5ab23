use thiserror::Error;

/// Errors surfaced by the library. Each variant maps to a distinct CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: unknown labels, bad files, missing table rows.
    #[error("{0}")]
    Input(String),
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A configured budget (expansion size, enumeration size) would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// The numeric minimization backend failed to certify an answer.
    #[error("backend failure: {0}")]
    Backend(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
