use freqlab_core::Error;

/// Everything that stops a command before a verdict is reached.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> CliError {
        CliError::Io { context: context.into(), source }
    }

    /// 3 for solver nonconvergence, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}
