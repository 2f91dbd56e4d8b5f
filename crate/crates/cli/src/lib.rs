//! Command-line front end: fidelity curves, noise budgets, the squeezing
//! solver and the verification suite.

pub mod config;
pub mod curve;
pub mod reports;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{OutputFormat, Overrides, RunConfig};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFICATION_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config {}:{line}: {message}", path.display())]
    Config { path: PathBuf, line: usize, message: String },

    #[error(transparent)]
    Core(#[from] cvtelefid_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },

    #[error("verification failed: {}", .0.join(", "))]
    Verification(Vec<&'static str>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_accuracy_failure() => exit::NUMERICAL,
            CliError::Verification(_) => exit::VERIFICATION_FAILED,
            _ => exit::USAGE,
        }
    }
}

/// Writes `content` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| CliError::Output {
            path: p.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cutoff = cvtelefid_core::Error::CutoffTooSmall {
            context: "x".into(),
            cutoff: 8,
            lost: 1.0,
            tolerance: 1e-6,
        };
        assert_eq!(CliError::Core(cutoff).exit_code(), exit::NUMERICAL);
        assert_eq!(CliError::Core(cvtelefid_core::Error::NoRoot("x".into())).exit_code(), exit::USAGE);
        assert_eq!(CliError::Usage("x".into()).exit_code(), exit::USAGE);
        assert_eq!(CliError::Verification(vec!["a"]).exit_code(), exit::VERIFICATION_FAILED);
    }
}
