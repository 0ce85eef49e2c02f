use std::process::ExitCode;

use partial_copula::CopulaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameters; nothing was computed.
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    /// A check or an estimation failed.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Failure(_) => ExitCode::from(1),
            CliError::Usage(_) | CliError::Io(_) => ExitCode::from(2),
        }
    }
}

impl From<CopulaError> for CliError {
    fn from(e: CopulaError) -> Self {
        match e {
            CopulaError::ParameterOutOfRange { .. }
            | CopulaError::UnsupportedFamily(_)
            | CopulaError::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}
