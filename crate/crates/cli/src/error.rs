use std::fmt;

use momentmono_core::Error;

/// Process exit codes. These are a stable contract.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const NON_IDENTIFIABLE: u8 = 3;
    pub const SOLVER: u8 = 4;
    pub const VIOLATION: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: exit::INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonIdentifiable { .. } => exit::NON_IDENTIFIABLE,
            Error::BracketFailure { .. }
            | Error::NonConvergence { .. }
            | Error::Convergence { .. } => exit::SOLVER,
            Error::Domain { .. }
            | Error::InvalidParameter { .. }
            | Error::InvalidOrders { .. }
            | Error::Overflow { .. }
            | Error::Data(_)
            | Error::Config(_) => exit::INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}
