use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("theorem check failed: {0}")]
    Theorem(String),
    #[error("{stage} stage failed: {source}")]
    Numerical {
        stage: &'static str,
        #[source]
        source: halftorus::Error,
    },
    #[error("sweep member {tag}: {message}")]
    Member { tag: String, code: u8, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Theorem(_) => 1,
            CliError::Numerical { .. } | CliError::Io { .. } => 2,
            CliError::Config(_) => 3,
            CliError::Member { code, .. } => *code,
        }
    }

    /// Wraps a library error raised in `stage`, routing validation and theorem
    /// errors to their own exit codes.
    pub fn stage(stage: &'static str) -> impl FnOnce(halftorus::Error) -> CliError {
        move |source| match source {
            halftorus::Error::InvalidShape(_)
            | halftorus::Error::InvalidGrid(_)
            | halftorus::Error::AngleOutOfRange { .. }
            | halftorus::Error::BelowThreshold { .. } => CliError::Config(format!("{stage}: {source}")),
            e if e.is_theorem_violation() => CliError::Theorem(format!("{stage}: {e}")),
            e => CliError::Numerical { stage, source: e },
        }
    }

    pub fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
