use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("dimension mismatch in task {task}, view {view}: expected {expected_rows}x{expected_cols}, found {actual_rows}x{actual_cols}")]
    ViewShape {
        task: usize,
        view: usize,
        expected_rows: usize,
        expected_cols: usize,
        actual_rows: usize,
        actual_cols: usize,
    },

    #[error("empty labeled set")]
    EmptyLabeledSet,

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is indefinite (eigenvalue {0:e})")]
    Indefinite(f64),

    #[error("linear system is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("objective diverged at iteration {iteration}: {previous:e} -> {current:e}")]
    Diverged {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors that stem from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. }
                | Error::Singular { .. }
                | Error::NonFiniteObjective { .. }
                | Error::Diverged { .. }
                | Error::Indefinite(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
