use thiserror::Error;

/// Failures of a command, split by exit code: invalid input exits with 2, an
/// oracle failure with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Oracle(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn invalid(why: impl Into<String>) -> Self {
        CliError::Invalid(why.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Oracle(_) => 3,
            CliError::Invalid(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<lpcat_core::Error> for CliError {
    fn from(e: lpcat_core::Error) -> Self {
        match e {
            lpcat_core::Error::OracleFailure(_) | lpcat_core::Error::AccessViolation(_) => CliError::Oracle(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
