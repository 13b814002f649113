use std::path::PathBuf;

use thiserror::Error;

use crate::optimizer::OptimizerTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (shape, symmetry, N ≠ 1, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Matrix is singular or too ill-conditioned to invert.
    #[error("matrix is numerically singular (smallest eigenvalue {eigenvalue:e})")]
    Singular { eigenvalue: f64 },

    #[error("eigensolver did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("objective became non-finite at update {update}")]
    NonFiniteObjective {
        update: usize,
        trace: Box<OptimizerTrace>,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::NoConvergence { .. } | Error::NonFiniteObjective { .. }
        )
    }

    /// Process exit code used by the CLI: 3 for numerical failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}
