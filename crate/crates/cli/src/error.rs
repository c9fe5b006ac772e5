use std::process::ExitCode;

/// Command failure, classified by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) | CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Same error, reclassified as a solver failure regardless of variant.
    pub(crate) fn solver(e: dctensor::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

impl From<dctensor::Error> for CliError {
    fn from(e: dctensor::Error) -> Self {
        use dctensor::Error as E;
        match e {
            E::Io(_) | E::Image { .. } | E::Format(_) => CliError::Io(e.to_string()),
            E::InvalidArgument(_) | E::InvalidDimension(_) | E::UnsupportedModel(_) | E::SizeGuard { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
