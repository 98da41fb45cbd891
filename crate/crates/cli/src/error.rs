use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("validation failed: {}", .failed.join(", "))]
    ValidationFailed {
        failed: Vec<String>,
        report: Box<flatfront::DiagnosticsReport>,
    },

    #[error(transparent)]
    Core(#[from] flatfront::Error),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        use flatfront::Error as E;
        match self {
            CliError::ValidationFailed { .. } => 1,
            CliError::ConfigParse { .. } | CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Core(e) => match e {
                E::NotHarmonic { .. } => 3,
                E::TransportDiverged { .. } => 5,
                E::DegenerateParameter { .. }
                | E::PotentialOverflow { .. }
                | E::InvalidDomain(_)
                | E::GridMismatch(_)
                | E::InvalidTerm(_) => 2,
                _ => 1,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
