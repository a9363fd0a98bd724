use std::path::Path;

/// Failures of a command, each mapped to a stable exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] migdet::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Artifact(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 configuration, 3 numerical, 4 artifact mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use migdet::Error as E;
        match self {
            CliError::Core(E::InvalidConfig(_) | E::InsufficientTrials { .. }) => 2,
            CliError::Core(E::ConfigMismatch { .. }) => 4,
            CliError::Core(_) => 3,
            CliError::Config(_) => 2,
            CliError::Artifact(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            context: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
