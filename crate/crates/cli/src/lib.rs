//! Command-line front end for `boundary-ising-core`: magnetization
//! profiles, tabulation of the transcendent, form-factor terms, and the
//! verification suite, written as CSV or JSON with a run manifest.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] boundary_ising_core::Error),
    #[error("refusing to write non-finite value {value} in column '{column}'")]
    NonFinite { column: &'static str, value: f64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{failed} verification check(s) failed")]
    Verification { failed: usize },
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
