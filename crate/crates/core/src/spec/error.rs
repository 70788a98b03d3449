use thiserror::Error;

/// Why a chart document was rejected. `path` points at the offending
/// property, e.g. `encoding.y.scale` or `transform[1].filter`.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpecError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported feature at `{path}`: {message}")]
    Unsupported { path: String, message: String },
    #[error("invalid chart at `{path}`: {message}")]
    Validation { path: String, message: String },
}

impl SpecError {
    pub fn unsupported(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Unsupported {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            SpecError::Syntax(_) => None,
            SpecError::Unsupported { path, .. } | SpecError::Validation { path, .. } => Some(path),
        }
    }
}
