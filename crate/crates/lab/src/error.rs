use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] pps_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error("incomplete grid, missing cells: {0}")]
    IncompleteGrid(String),
}

impl LabError {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        LabError::Config {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }

    /// Process exit status for this error: 2 usage, 3 infeasible oracle, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(pps_core::Error::OracleInfeasible { .. }) => 3,
            LabError::Io { .. } | LabError::Csv { .. } | LabError::Parse { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
