//! Command-line front end and verification harness for `musb-core`.
//!
//! The binary is a thin layer over this library: [`grid`] parses flag
//! values, [`probes`] resolves probe functions, [`suites`] runs identity
//! checks cell by cell and [`output`] renders the resulting reports.

pub mod grid;
pub mod output;
pub mod probes;
pub mod suites;

use std::process::ExitCode;

use musb_core::quadrature::DEFAULT_MAX_LEVEL;
use musb_core::transforms::GRAM_DEFAULT_MAX_LEVEL;
use musb_core::Error;

/// Environment variable overriding the line-quadrature refinement ceiling.
pub const QUAD_LEVEL_ENV: &str = "MUSB_QUAD_LEVEL";

/// Process exit status, stable across commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    NonConvergence = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numeric(Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Invalid parameters are usage errors; everything else means the
    /// numerics did not settle.
    pub fn from_core(e: Error) -> Self {
        if is_numeric(&e) {
            CliError::Numeric(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }

    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) | CliError::Io(_) => Status::Usage,
            CliError::Numeric(_) => Status::NonConvergence,
        }
    }
}

pub fn is_numeric(e: &Error) -> bool {
    matches!(
        e,
        Error::SeriesNonConvergence { .. }
            | Error::SeriesOverflow(_)
            | Error::QuadratureNonConvergence { .. }
            | Error::TranslationTruncation { .. }
    )
}

/// Refinement ceilings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub line: u32,
    pub plane: u32,
}

impl Levels {
    /// Defaults, with the line ceiling taken from [`QUAD_LEVEL_ENV`] if set.
    pub fn from_env() -> Result<Self, CliError> {
        let line = match std::env::var(QUAD_LEVEL_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u32>()
                .ok()
                .filter(|l| (4..=14).contains(l))
                .ok_or_else(|| CliError::usage(format!("{QUAD_LEVEL_ENV} must be an integer in 4..=14, got {v:?}")))?,
            Err(_) => DEFAULT_MAX_LEVEL,
        };
        Ok(Levels {
            line,
            plane: GRAM_DEFAULT_MAX_LEVEL,
        })
    }
}

impl Default for Levels {
    fn default() -> Self {
        Levels {
            line: DEFAULT_MAX_LEVEL,
            plane: GRAM_DEFAULT_MAX_LEVEL,
        }
    }
}
