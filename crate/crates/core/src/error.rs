use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("hypothesis violation: field `{field}` has value {value} at ({x1}, {x2})")]
    Hypothesis {
        field: String,
        x1: f64,
        x2: f64,
        value: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (achieved {achieved:.3e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        achieved: f64,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("acceptance failure: {0}")]
    Acceptance(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::Numerical(_) | Error::Acceptance(_) => 1,
            Error::Config(_) | Error::Hypothesis { .. } | Error::Io { .. } | Error::Parse(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
