//! Command-line orchestration: file formats, configuration, reports and the
//! `cavityfit` subcommands.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure or
//! non-convergence (a partial report is still written).

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod report;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Error;

pub use cli::run;
pub use report::{Report, ResultValue};

/// Environment variable naming the directory for outputs without `--out`.
pub const OUT_DIR_ENV: &str = "CAVITYFIT_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Singular(_) | Error::TraceDrift { .. } => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

pub(crate) fn resolve_out(out: Option<&Path>, default_name: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name),
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
