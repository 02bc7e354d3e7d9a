use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error("{context}: {source}")]
    Core {
        context: &'static str,
        source: stc_core::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),
}

impl From<stc_core::Error> for CliError {
    fn from(source: stc_core::Error) -> Self {
        CliError::Core {
            context: "computation",
            source,
        }
    }
}

impl CliError {
    pub fn core(context: &'static str) -> impl FnOnce(stc_core::Error) -> CliError {
        move |source| CliError::Core { context, source }
    }

    /// 1 for failed verification, 2 for domain and usage errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            _ => 2,
        }
    }
}
