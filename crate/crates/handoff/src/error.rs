use std::path::Path;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Malformed input file: syntax, unknown field, wrong type, bad header.
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] handoff_core::Error),
}

impl AppError {
    pub fn parse(path: &Path, msg: impl std::fmt::Display) -> Self {
        AppError::Parse {
            path: path.display().to_string(),
            msg: msg.to_string(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for bad input or usage, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use handoff_core::Error as E;
        match self {
            AppError::Parse { .. } | AppError::Usage(_) => 1,
            AppError::Io { .. } => 2,
            AppError::Core(e) => match e {
                E::InvalidScenario { .. }
                | E::InvalidParameter { .. }
                | E::MismatchedScenarios(_)
                | E::InvalidTrace(_)
                | E::InvalidSample(_)
                | E::InvalidLayout(_) => 1,
                _ => 2,
            },
        }
    }
}
