use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] mkdv_series::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("writing {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    /// 2 for a bad request, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Output { .. } => 4,
        }
    }
}
