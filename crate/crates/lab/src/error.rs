use std::path::{Path, PathBuf};

use weierstrass_core::Error as CoreError;

/// Failures of a `wlab` invocation, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("io: {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Io { .. } => 4,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        LabError::Io { path: path.to_path_buf(), message: err.to_string() }
    }

    pub fn config(field: &str, reason: impl std::fmt::Display) -> Self {
        LabError::Config(format!("{field}: {reason}"))
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument { field, reason } => LabError::Config(format!("{field}: {reason}")),
            CoreError::NonPeriodicPerturbation => LabError::Config(format!("coords: {e}")),
            CoreError::Domain(_)
            | CoreError::MalformedTable(_)
            | CoreError::IndexOutOfRange { .. }
            | CoreError::NonPeriodic => LabError::Config(e.to_string()),
            other => LabError::Numeric(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
