use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

/// Failures mapped onto the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical contract violated: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Display) -> Self {
        Self::Config(format!("{field}: {message}"))
    }

    pub fn io(path: &Path, err: impl Display) -> Self {
        Self::Io(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<qwm_core::Error> for CliError {
    fn from(e: qwm_core::Error) -> Self {
        use qwm_core::Error as E;
        match e {
            E::TraceDrift { .. } | E::NonFinite(_) => Self::Numerical(e.to_string()),
            E::Serialization(_) => Self::Io(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}
