use thiserror::Error;

/// Errors raised by field construction, path extraction and the estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("({x},{t}) has the wrong parity for this lattice")]
    Parity { x: i64, t: i64 },

    #[error("({x},{t}) lies outside the stored window")]
    OutOfWindow { x: i64, t: i64 },

    #[error("request needs {needed} units of work or storage, limit is {limit}")]
    Capacity { needed: u128, limit: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no admissible path: {0}")]
    NoAdmissiblePath(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
