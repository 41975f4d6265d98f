//! Error type shared by the whole workbench.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid input or contract violation: bad diagram type, mismatched
    /// ranks, out-of-range arguments.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parse failure in one of the textual grammars.
    #[error("parse error: {0}")]
    Parse(String),

    /// A requested value exists mathematically but is not reachable by the
    /// implemented (deliberately partial) computation, e.g. a braid tower
    /// that leaves the letter-valid fragment.
    #[error("not computable in this frame: {0}")]
    Infeasible(String),

    /// A truncated search could not certify the answer either way.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
    pub fn inconclusive(msg: impl Into<String>) -> Self {
        Error::Inconclusive(msg.into())
    }

    /// Process exit code for the CLI: domain/parse errors are 2,
    /// infeasible/inconclusive results are 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Infeasible(_) | Error::Inconclusive(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
