use std::fmt;
use std::io;

use qaforge::align::AlignError;
use qaforge::evalkit::EvalError;
use qaforge::retrieve::PipelineError;
use qaforge::translate::TranslateError;
use serde_json::json;

/// A failure reported as one JSON object on stderr; `code` is the process
/// exit status.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, code: i32, message: impl Into<String>) -> Self {
        CliError {
            kind,
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", 2, message)
    }

    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind, "message": self.message, "exit_code": self.code}})
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::new("io", 3, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new("parse", 3, e.to_string())
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        Self::new("config", 2, e.to_string())
    }
}

impl From<TranslateError> for CliError {
    fn from(e: TranslateError) -> Self {
        let kind = match e {
            TranslateError::InvalidSpec(_) => return Self::usage(e.to_string()),
            TranslateError::Io(_) => "io",
            _ if e.is_retryable() => "provider_unavailable",
            _ => "translation",
        };
        Self::new(kind, 4, e.to_string())
    }
}

impl From<AlignError> for CliError {
    fn from(e: AlignError) -> Self {
        match e {
            AlignError::Io(e) => e.into(),
            AlignError::InvalidConfig(_) => Self::usage(e.to_string()),
            _ => Self::new("alignment", 5, e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Translate(e) => e.into(),
            PipelineError::Align(e) => e.into(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        Self::new("evaluation", 6, e.to_string())
    }
}
