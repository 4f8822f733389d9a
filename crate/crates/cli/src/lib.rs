//! Driver for the `nsh` command-line tool.

pub mod commands;
pub mod config;
pub mod json;
pub mod pgm;

use nsh_core::NshError;

pub const TOOL_NAME: &str = "nsh";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EMPTY_MESSAGE: &str = "Nehari manifold empty at this resolution";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or input; nothing is written.
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<NshError> for CliError {
    fn from(e: NshError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    /// Printed on standard output.
    pub report: String,
    /// Printed on standard error.
    pub message: Option<String>,
}
