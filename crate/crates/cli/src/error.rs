use std::path::PathBuf;

use thiserror::Error;

/// Exit status for bad input: malformed config, missing files, invalid flags.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while running or writing results.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration key or flag is missing, malformed or out of range.
    #[error("invalid `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Core(#[from] qmadqn::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use qmadqn::Error as E;
        match self {
            CliError::Config { .. } => EXIT_USAGE,
            CliError::Core(
                E::Config(_) | E::Validation { .. } | E::Argument(_) | E::Index { .. } | E::Json(_),
            ) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io { .. } | CliError::Runtime(_) => EXIT_FAILURE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
