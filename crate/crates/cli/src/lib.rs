//! Orchestration for the `kacgap` binary: run configuration, the seeded
//! parallel simulation harness, and the verification suites.

pub mod config;
pub mod simulate;
pub mod verify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes: 0 success, 1 suite failure, 2 usage error, 3 I/O error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    SuiteFailure = 1,
    Usage = 2,
    Io = 3,
}
