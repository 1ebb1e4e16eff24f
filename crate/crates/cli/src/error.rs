use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] optsqueeze_core::Error),
    #[error("malformed input {path}: {msg}")]
    Input { path: String, msg: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 input validation, 3 numerical quality, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Input { .. } => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}
