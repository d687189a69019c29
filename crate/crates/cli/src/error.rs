use std::fmt;

/// Failures of one CLI invocation, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    Core(ggkdv::Error),
    Config(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ggkdv::Error::*;
        match self {
            CliError::Core(ConstraintViolation { .. }) => 2,
            CliError::Core(
                IllConditioned { .. } | GramianSingular { .. } | EpsilonUnderflow { .. },
            ) => 3,
            CliError::Core(InvalidParams(_) | InvalidArgument(_) | Alias { .. }) => 4,
            CliError::Config(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ggkdv::Error> for CliError {
    fn from(e: ggkdv::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
