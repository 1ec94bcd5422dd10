use serde::Serialize;
use thiserror::Error;

use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{scenario}: {source}")]
    Numerical { scenario: String, source: LabError },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Machine-readable form written to stderr by the binary.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub code: &'static str,
    pub exit_code: u8,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
}

impl HarnessError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config { key: key.into(), message: message.into() }
    }

    pub fn numerical(scenario: &str, source: LabError) -> Self {
        HarnessError::Numerical { scenario: scenario.to_owned(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config { .. } => 2,
            HarnessError::Numerical { .. } => 3,
            HarnessError::Io(_) => 4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::Config { .. } => "config_error",
            HarnessError::Numerical { source, .. } => source.code(),
            HarnessError::Io(_) => "io_error",
        }
    }

    pub fn diagnostic(&self) -> Diagnostic {
        Diagnostic {
            code: self.code(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            key: match self {
                HarnessError::Config { key, .. } => Some(key.clone()),
                _ => None,
            },
            scenario: match self {
                HarnessError::Numerical { scenario, .. } => Some(scenario.clone()),
                _ => None,
            },
        }
    }
}
