use std::fmt;

use dce_core::Error;

/// Everything that can stop a command, with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Bad flag or config value caught before reaching the core.
    Invalid(String),
    Io(std::io::Error),
    /// Verification checks ran and some failed.
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.root() {
                Error::InvalidParameter { .. } => 2,
                Error::Domain(_) | Error::Bracket { .. } => 3,
                Error::Convergence { .. } => 4,
                Error::Cell { .. } => unreachable!("root() strips cell wrappers"),
            },
            CliError::Invalid(_) => 2,
            CliError::Io(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Invalid(msg) => write!(f, "invalid input: {msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::ChecksFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cell = Error::Cell {
            chi0: 1.0,
            lambda0: 0.0,
            source: Box::new(Error::Convergence {
                estimate: 1.0,
                abs_error: 1.0,
                evaluations: 10,
            }),
        };
        assert_eq!(CliError::Core(cell).exit_code(), 4);
        assert_eq!(CliError::Core(Error::Domain("x")).exit_code(), 3);
        assert_eq!(CliError::Core(Error::Bracket { lo: 0.0, hi: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::Invalid("x".into()).exit_code(), 2);
        assert_eq!(CliError::ChecksFailed(2).exit_code(), 1);
    }
}
