//! Library side of the `nniquad` command-line tool.

pub mod commands;
pub mod config;
pub mod plot;

use thiserror::Error;

/// Environment variable that redirects all written output files.
pub const OUTPUT_DIR_ENV: &str = "NNIQUAD_OUTPUT_DIR";

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// A constraint or verdict failed.
    pub const CONSTRAINT: u8 = 1;
    /// Bad arguments or an unusable config.
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}
