use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input, invalid flags or an operand the suite needs is missing.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] shnr_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// 3 for operators without an A-adjoint, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(shnr_core::Error::NoAdjoint { .. }) => 3,
            _ => 2,
        }
    }
}
