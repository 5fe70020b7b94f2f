use std::path::PathBuf;

use ldsp_core::edi::EdiError;
use ldsp_core::evaluation::EvalError;
use ldsp_core::generation::GenError;
use ldsp_core::io::DataError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("{}{source}", prefix(.path))]
    Data { path: Option<PathBuf>, source: DataError },
    #[error("{}{source}", prefix(.path))]
    Edi { path: Option<PathBuf>, source: EdiError },
    #[error("{}{source}", prefix(.path))]
    Eval { path: Option<PathBuf>, source: EvalError },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
}

fn prefix(path: &Option<PathBuf>) -> String {
    path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default()
}

impl From<DataError> for CliError {
    fn from(source: DataError) -> Self {
        Self::Data { path: None, source }
    }
}

impl CliError {
    /// 2 for usage, configuration and I/O problems, 3 for data the analysis
    /// cannot use, 4 for a missing API key, 1 for anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Config { .. } | Self::Data { .. } | Self::ThreadPool(_) => 2,
            Self::Edi { source: EdiError::InvalidConfig(_), .. } => 2,
            Self::Edi { .. } => 3,
            Self::Eval { source: EvalError::InvalidArgument(_), .. } => 2,
            Self::Eval { .. } => 3,
            Self::Gen(GenError::AuthMissing(_)) => 4,
            Self::Gen(GenError::Data(_) | GenError::InvalidJob(_) | GenError::UnknownProperty(_)) => 2,
            Self::Gen(GenError::EndpointError { .. }) => 1,
        }
    }
}
