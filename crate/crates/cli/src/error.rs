use netrobust_evolve::EvolveError;
use thiserror::Error;

/// Failure of a command, grouped by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration file.
    #[error("{0}")]
    Config(String),
    /// Unreadable or malformed input data (graphs, programs).
    #[error("{0}")]
    Input(String),
    /// The model backend could not answer.
    #[error("{0}")]
    Backend(String),
    /// Results could not be written.
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Backend(_) => 4,
        }
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Config(_) | EvolveError::Resume(_) => CliError::Config(e.to_string()),
            EvolveError::Llm(_) => CliError::Backend(e.to_string()),
            EvolveError::Io { .. } | EvolveError::Json { .. } => CliError::Output(e.to_string()),
        }
    }
}
