//! Batch driver for the modheat computations.

pub mod commands;
pub mod config;

pub use commands::{cmd_finite, cmd_heat, cmd_spectrum, cmd_verify, parse_n_spec, Output, Status, VerifyHooks};
pub use config::{resolve, OutputFormat, Overrides, RunConfig};

/// Exit code for a tolerance violation or numeric failure.
pub const EXIT_VIOLATION: u8 = 1;
/// Exit code for bad arguments, configuration or resources.
pub const EXIT_ARGUMENT: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Argument(_) => EXIT_ARGUMENT,
            CliError::Numeric(_) => EXIT_VIOLATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Argument(m) | CliError::Numeric(m) => m,
        }
    }

    /// Prefixes the message with where it happened.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Argument(m) => CliError::Argument(format!("{ctx}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{ctx}: {m}")),
        }
    }
}

impl From<modheat_core::Error> for CliError {
    fn from(e: modheat_core::Error) -> Self {
        use modheat_core::Error as E;
        match e {
            E::Argument(_) | E::Resource { .. } | E::Parse { .. } => CliError::Argument(e.to_string()),
            E::Invariant(_) | E::Boundary(_) | E::Numeric(_) => CliError::Numeric(e.to_string()),
        }
    }
}
