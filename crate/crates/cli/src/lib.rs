//! Command-line front end for the DUDe simulator: config-file parsing with
//! named defaults, deterministic CSV/JSON emission, and direct access to
//! the equation-level calculators.

pub mod calc;
pub mod config;
pub mod emit;

use std::fmt;

/// Errors mapped onto the process exit codes: validation problems exit 1,
/// failed campaign assertions exit 2, I/O trouble exits 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(dude_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(dude_core::Error::AssertionFailed(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<dude_core::Error> for CliError {
    fn from(e: dude_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
