//! Command-line front end: configuration, profile CSV files, summary JSON
//! and the subcommands that tie them to `nbarrier-core`.

pub mod commands;
pub mod config;
pub mod profile_csv;
pub mod summary;

use anyhow::Result;

use crate::config::RunConfig;
use crate::summary::write_summary_json;

/// Exit status of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Every requested check held.
    Ok,
    /// At least one bound check has a margin below `-tol`.
    Violation,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 2,
        }
    }
}

/// Runs one command and writes its summary. Errors map to exit status 1;
/// a summary produced before the error is still written.
pub fn run(cfg: &RunConfig) -> Result<Status> {
    let outcome = commands::execute(cfg)?;
    write_summary_json(&outcome.summary, cfg.options.summary.as_deref())?;
    if let Some(err) = outcome.failure {
        return Err(err);
    }
    Ok(if outcome.summary.has_violation() {
        Status::Violation
    } else {
        Status::Ok
    })
}
