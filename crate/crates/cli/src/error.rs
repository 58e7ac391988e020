use thiserror::Error;

/// Failures of a CLI invocation, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// The input does not satisfy its schema or a library invariant.
    #[error("invalid input at `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("computation failed: {0}")]
    Computation(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation { .. } => 2,
            CliError::Computation(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<intercomp::Error> for CliError {
    fn from(e: intercomp::Error) -> Self {
        CliError::Computation(e.to_string())
    }
}

/// Attaches a field name to a library error raised while validating input.
pub trait ValidateField<T> {
    fn field(self, name: &str) -> Result<T, CliError>;
}

impl<T> ValidateField<T> for intercomp::Result<T> {
    fn field(self, name: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::invalid(name, e))
    }
}
