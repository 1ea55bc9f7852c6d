use alloc::string::String;
use core::fmt;

/// Errors reported by graph operations, family construction and solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A vertex id that is not present in the graph.
    UnknownVertex(u32),
    /// An edge (given as a vertex pair) that is not present in the graph.
    UnknownEdge(u32, u32),
    /// A precondition on caller-supplied data was violated.
    InvalidInput(String),
    /// A contract between solver stages was violated (internal misuse).
    ContractViolation(String),
    /// An exhaustive or enumerative routine was asked to run beyond its guard.
    SizeGuard {
        what: &'static str,
        limit: u64,
        actual: u64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            Error::UnknownEdge(u, v) => write!(f, "unknown edge {u}-{v}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ContractViolation(msg) => write!(f, "contract violation: {msg}"),
            Error::SizeGuard {
                what,
                limit,
                actual,
            } => write!(f, "{what} exceeds guard: {actual} > {limit}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}
