//! File formats, report serialization, and command implementations for
//! the `genbound` binary.
//!
//! Exit codes are a stable contract:
//!
//! | code | meaning                        |
//! |------|--------------------------------|
//! | 0    | null retained / bound holds    |
//! | 1    | input error (files, ranges)    |
//! | 2    | usage error (flags)            |
//! | 3    | null rejected / bound violated |

pub mod commands;
pub mod cost_file;
pub mod report;
pub mod runset_file;

use std::fmt;

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Exit code for a rejected null or a violated bound.
pub const EXIT_REJECTED: u8 = 3;

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, unparsable, or out-of-range input. Exit code 1.
    Input(String),
    /// Flag combinations the parser cannot catch. Exit code 2.
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<genbound::Error> for CliError {
    fn from(err: genbound::Error) -> Self {
        CliError::Input(err.to_string())
    }
}
