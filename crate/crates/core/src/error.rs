use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "correlation matrix is numerically singular even with maximum jitter; \
         points {first} and {second} are the most strongly correlated pair"
    )]
    SingularMatrix { first: usize, second: usize },

    #[error("model fit failed: {0}")]
    FitFailed(String),

    #[error(
        "decomposition simulation over {requested} points is infeasible: the \
         {requested}x{requested} covariance matrix exceeds the memory cap of {cap} points"
    )]
    Infeasible { requested: usize, cap: usize },

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
