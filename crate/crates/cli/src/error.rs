use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or incomplete configuration, bad flags. Exit code 1.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Parameters parse but violate a physical constraint. Exit code 2.
    #[error("physical validity failure: {0}")]
    Physical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Physical(_) => 2,
        }
    }
}

impl From<opendeco::Error> for CliError {
    fn from(e: opendeco::Error) -> Self {
        CliError::Physical(e.to_string())
    }
}
