use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading, validating or transforming input data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid network: {0}")]
    Validation(String),

    #[error("invalid risk data: {0}")]
    Risk(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        DataError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// Errors raised by the optimization layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("problem is infeasible")]
    Infeasible,

    #[error("problem is unbounded")]
    Unbounded,

    #[error("numerical failure in LP engine: {0}")]
    Numerical(String),

    #[error("malformed problem: {0}")]
    Malformed(String),

    #[error("assignment has no value for variable `{0}`")]
    MissingValue(String),
}

/// Errors raised while building or decoding the shutoff model, or running the
/// rolling-horizon loop.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Data(#[from] DataError),

    #[error(transparent)]
    Solve(#[from] SolveError),

    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    #[error("solution decoding failed: {0}")]
    Decode(String),

    #[error("day {day}: {source}")]
    Day {
        day: usize,
        #[source]
        source: Box<ModelError>,
    },

    #[error("day {day}: node budget exhausted before any feasible schedule was found")]
    NoIncumbent { day: usize },
}

impl ModelError {
    pub(crate) fn at_day(self, day: usize) -> Self {
        match self {
            e @ ModelError::Day { .. } | e @ ModelError::NoIncumbent { .. } => e,
            other => ModelError::Day {
                day,
                source: Box::new(other),
            },
        }
    }
}
