use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An enumeration would exceed the configured vertex budget.
    #[error("resource limit exceeded: {what} needs {needed} vertices, budget is {budget}")]
    Resource { what: String, needed: u128, budget: usize },

    /// A structural invariant of a graph or map does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A stencil or matrix power would read outside a truncated window.
    #[error("boundary contamination: {0}")]
    Boundary(String),

    /// Iterative numerics did not reach the requested tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed serialized input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
