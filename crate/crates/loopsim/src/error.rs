use std::path::PathBuf;

use loopsim_core::Error as CoreError;

/// Errors surfaced by the command-line layer.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    ConfigFile { path: PathBuf, message: String },

    #[error("{0}")]
    Format(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    /// Process exit status: 2 for usage and range errors, 1 for runtime
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::ConfigFile { .. } => 2,
            CliError::Core(CoreError::Argument(_) | CoreError::Config(_)) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
