use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FujitaError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical error: {what} ({diagnostics})")]
    Numerical { what: String, diagnostics: String },
    #[error("range error: {0}")]
    Range(String),
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("io error: {0}")]
    Io(String),
}

impl FujitaError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        FujitaError::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        FujitaError::Validation(msg.into())
    }

    pub(crate) fn numerical(what: impl Into<String>, diagnostics: impl Into<String>) -> Self {
        FujitaError::Numerical {
            what: what.into(),
            diagnostics: diagnostics.into(),
        }
    }
}

impl From<std::io::Error> for FujitaError {
    fn from(e: std::io::Error) -> Self {
        FujitaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FujitaError>;
