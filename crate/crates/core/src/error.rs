use thiserror::Error;

use crate::cnf::SolutionCollection;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("capability limit: {0}")]
    Capability(String),
    #[error("formula is unsatisfiable")]
    Unsat,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no solution found within the repetition budget")]
    NotFound,
    /// A driver gave up after exhausting oracle retries; `built` holds the members collected so far.
    #[error("oracle failed after retries; {} of {target} members built", built.len())]
    Partial {
        built: SolutionCollection,
        target: usize,
        oracle_calls: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
