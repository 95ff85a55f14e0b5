use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hminus_core::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cache {path} line {line}: {detail}")]
    Cache {
        path: PathBuf,
        line: usize,
        detail: String,
    },
}

impl CliError {
    /// 1 verification failure, 2 invalid input, 3 precision exhaustion.
    pub fn exit_code(&self) -> u8 {
        use hminus_core::Error as E;
        match self {
            CliError::Core(E::PrecisionExhausted { .. } | E::Undetermined { .. } | E::CannotDivide(_)) => 3,
            CliError::Core(E::Internal(_)) => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
