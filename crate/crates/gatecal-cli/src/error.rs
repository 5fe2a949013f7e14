//! CLI error classification; each variant maps to a documented exit code.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] crate::format::FormatError),

    #[error("{0}")]
    InvalidArgs(String),

    /// Singular design; carries any report produced before the failure so
    /// the caller can still print it.
    #[error("design matrix is singular")]
    SingularDesign(String),

    #[error("optimization failed: {0}")]
    OptimizerFailed(String),

    #[error(transparent)]
    Core(#[from] gatecal::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Exit code: 2 parse/usage, 3 singular design, 4 optimizer failure,
    /// 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::InvalidArgs(_) => 2,
            CliError::SingularDesign(_) => 3,
            CliError::OptimizerFailed(_) => 4,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}
