use thiserror::Error;
use vortexlab::Error as CoreError;

/// Failure of a command. A failed `verify` battery is not an error: it
/// prints its table and exits with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_)
            | CoreError::Unsupported(_)
            | CoreError::InvalidParameter(_)
            | CoreError::Geometry(_)
            | CoreError::Io(_)
            | CoreError::Format(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
