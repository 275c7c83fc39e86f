use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }
}

impl From<resetwalk::Error> for CliError {
    fn from(e: resetwalk::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}
