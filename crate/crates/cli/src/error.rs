use lgbeam::LgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed field file {path}: {reason}")]
    Format { path: String, reason: String },

    #[error(transparent)]
    Numerical(#[from] LgError),

    #[error("{failed} check(s) outside tolerance")]
    VerificationFailed { failed: usize },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 0 pass, 1 verification failure, 2 usage, 3 I/O, 4 numerical guard.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Usage(_) | CliError::Numerical(LgError::InvalidParameter(_)) => 2,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Extra line printed after the error message.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Numerical(LgError::AliasingGuard { .. }) => {
                Some("hint: re-evaluate the field with a larger --extent, or pass --padding 2 (or more)")
            }
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
