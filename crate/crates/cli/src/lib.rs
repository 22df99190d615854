//! Command line front end: PMF ingestion, check/attack/sweep commands, and
//! machine-readable reports.
//!
//! Exit codes across all subcommands: 0 when the requested object exists
//! (condition holds / channel produced / sweep completed), 1 when the
//! decision is negative, 2 on input or solver errors.

use std::fmt;

use simcheck_core::attack::AttackError;
use simcheck_core::lp::LpError;
use simcheck_core::pmf::PmfError;
use simcheck_core::simulatability::SimError;

pub mod commands;
pub mod report;
pub mod schema;

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    Json(serde_json::Error),
    BadProbability(String),
    BadShape(String),
    BadFlag(String),
    BadTemplate(String),
    Pmf(PmfError),
    Sim(SimError),
    Attack(AttackError),
    Lp(LpError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Json(e) => write!(f, "json error: {e}"),
            CliError::BadProbability(s) => write!(f, "cannot parse probability '{s}'"),
            CliError::BadShape(s) => write!(f, "malformed table: {s}"),
            CliError::BadFlag(s) => write!(f, "{s}"),
            CliError::BadTemplate(s) => write!(f, "bad sweep template: {s}"),
            CliError::Pmf(e) => write!(f, "invalid PMF: {e}"),
            CliError::Sim(e) => write!(f, "check failed: {e}"),
            CliError::Attack(e) => write!(f, "attack failed: {e}"),
            CliError::Lp(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl From<PmfError> for CliError {
    fn from(e: PmfError) -> Self {
        CliError::Pmf(e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        CliError::Attack(e)
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        CliError::Lp(e)
    }
}
