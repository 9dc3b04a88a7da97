use heightlab::Error as CoreError;
use thiserror::Error;

/// Exit codes: 0 ok, 2 input, 3 precision, 4 budget.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Precision(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn input(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    /// A core error raised while handling the value at `path`.
    pub fn core_at(path: impl Into<String>, e: CoreError) -> Self {
        match e {
            CoreError::PrecisionExhausted { .. } | CoreError::NoConvergence(_) => CliError::Precision(e.to_string()),
            CoreError::BudgetExceeded => CliError::Budget(e.to_string()),
            other => CliError::input(path, other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Io(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            CliError::Input { path, .. } => Some(path),
            _ => None,
        }
    }
}
