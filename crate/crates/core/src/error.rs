use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical failure at t = {t}: {reason}")]
    NumericalFailure { t: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ambiguous transition at t = {t}: edges `{first}` and `{second}` are both enabled")]
    AmbiguousTransition { t: f64, first: String, second: String },

    #[error("state {state:?} lies in no region")]
    UncoveredState { state: Vec<f64> },

    #[error("infeasible: constraint rows {rows:?} violated")]
    Infeasible { rows: Vec<usize> },

    #[error("grazing guard contact at t = {t}: |grad g . f| = {rate:e}")]
    Grazing { t: f64, rate: f64 },

    #[error("initial condition rejected: {0}")]
    InvalidInitialState(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn numerical(t: f64, reason: impl Into<String>) -> Self {
        Error::NumericalFailure {
            t,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
