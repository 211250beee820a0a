use thiserror::Error;

/// Errors produced by channel construction, rate evaluation and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("numerical failure: {message} (min eigenvalue {min_eigenvalue:e}, max eigenvalue {max_eigenvalue:e})")]
    Numerical {
        message: String,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
