use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 ok, 1 verification or runtime failure, 2 configuration error,
    /// 3 invariant violation during a run.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Verify(_) | CliError::Run(_) | CliError::Io(_) => 1,
        })
    }
}

/// Errors raised while a run is in progress.
impl From<cascade_core::Error> for CliError {
    fn from(e: cascade_core::Error) -> Self {
        use cascade_core::Error as E;
        match e {
            E::InvariantViolation { .. } | E::StepProbability { .. } => CliError::Invariant(e.to_string()),
            E::UnsupportedVariant { .. } => CliError::Config(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        use cascade_core::Error as E;
        let code = |e: E| CliError::from(e).exit_code();
        assert_eq!(code(E::InvariantViolation { time: 1.0, detail: "trace".into() }), ExitCode::from(3));
        assert_eq!(code(E::UnsupportedVariant { model: "m", operation: "o" }), ExitCode::from(2));
        assert_eq!(CliError::Verify("A5".into()).exit_code(), ExitCode::from(1));
    }
}
