use std::path::PathBuf;

use gauge_sim::SimError;

/// Exit status 1: the run completed or was refused on physical grounds.
pub const EXIT_ADVISORY: u8 = 1;
/// Exit status 2: the input could not be interpreted.
pub const EXIT_MALFORMED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Advisory(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn malformed(msg: impl Into<String>) -> Self {
        CliError::Malformed(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Advisory(_) => EXIT_ADVISORY,
            CliError::Sim(SimError::Numeric(_) | SimError::HermiticityViolation { .. }) => EXIT_ADVISORY,
            CliError::Sim(_) | CliError::Malformed(_) | CliError::Io { .. } => EXIT_MALFORMED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
