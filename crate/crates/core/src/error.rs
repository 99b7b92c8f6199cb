use std::path::PathBuf;

/// Errors raised by the solver library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid parameters or configuration; `key` names the offending setting.
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// API misuse: out-of-range indices, mismatched dimensions, stale data.
    #[error("usage error: {0}")]
    Usage(String),

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix: zero pivot at column {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("singular pivot block {block} in block-tridiagonal solve")]
    SingularBlock { block: usize },

    #[error("singular local system on element {element}")]
    SingularElement { element: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonFailure { iterations: usize, residual: f64 },

    #[error("time step {step} failed: {source}")]
    StepFailure {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Petviashvili iteration failed after {iterations} iterations (last residual {:.3e})", residual_history.last().copied().unwrap_or(f64::NAN))]
    Petviashvili {
        iterations: usize,
        residual_history: Vec<f64>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
