use std::io;
use std::path::Path;

use codesign_core::latency::LatencyError;
use codesign_core::search::SearchError;
use codesign_core::{AccuracyError, EvalError};
use thiserror::Error;

use crate::kv::ConfigError;

/// Failures of a command, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {error}")]
    Config { path: String, error: ConfigError },
    /// Unparseable input or missing prerequisite files.
    #[error("{0}")]
    Input(String),
    /// A metric source has no value for a required point.
    #[error("{0}")]
    Coverage(String),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Input(_) => 2,
            CliError::Coverage(_) => 3,
            CliError::Io { .. } | CliError::Failed(_) => 1,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { context: path.display().to_string(), source }
    }
}

impl From<LatencyError> for CliError {
    fn from(e: LatencyError) -> Self {
        match e {
            LatencyError::CoverageGap { .. } => CliError::Coverage(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Latency(l) => l.into(),
            EvalError::Accuracy(AccuracyError::NotInTable(_)) => CliError::Coverage(e.to_string()),
            EvalError::InvalidCell(_) => CliError::Input(e.to_string()),
            EvalError::Accuracy(_) => CliError::Failed(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Eval { step, error } => match CliError::from(error) {
                CliError::Coverage(m) => CliError::Coverage(format!("step {step}: {m}")),
                other => CliError::Failed(format!("step {step}: {other}")),
            },
            SearchError::Config(m) => CliError::Input(format!("invalid search config: {m}")),
            SearchError::Policy(p) => CliError::Failed(p.to_string()),
        }
    }
}
