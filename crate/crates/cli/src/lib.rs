//! Library half of the `duelbandit` binary: config parsing, dataset
//! resolution, and the command implementations. Split out so integration
//! tests can drive the exact code paths the binary uses.

pub mod commands;
pub mod config;
pub mod dataset;

/// Command failures, carrying the process exit code contract:
/// 1 usage/config, 2 data/validation, 3 runtime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Runtime(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}
