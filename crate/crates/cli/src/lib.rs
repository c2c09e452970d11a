//! Command implementations behind the `pmm` binary.

pub mod bench;
pub mod config;
pub mod plan;
pub mod trajfile;
pub mod validate;
pub mod waypoints;

pub use bench::{cmd_bench, BenchMode};
pub use plan::cmd_plan;
pub use validate::cmd_validate;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Constraint violation found by `validate` (exit 1).
    Violation(String),
    /// Unreadable or malformed input (exit 2).
    Parse(String),
    /// Planner failure or unwritable output (exit 3).
    Planning(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Violation(m) | CliError::Parse(m) | CliError::Planning(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Planning(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Violation(m) => write!(f, "validation failed: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Planning(m) => write!(f, "planning error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Planning(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}
