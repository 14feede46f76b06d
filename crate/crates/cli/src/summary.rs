//! The summary JSON document written by every command.
//!
//! Keys appear in declaration order, no timestamps or host details are
//! recorded, and non-finite numbers serialize as `null`, so one run
//! configuration always yields the same bytes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use nbarrier_core::{BarrierLevels, BoundCheckReport, BoundParams, HypothesisReport, Lv2Params, SolutionClass, WaveProfile};
use serde::Serialize;

use crate::config::CommandKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub system: SystemSummary,
    pub hypotheses: Vec<HypothesisReport>,
    pub bounds: Vec<BoundValue>,
    pub checks: Vec<CheckRecord>,
    pub solver: Vec<ProfileRecord>,
}

impl Summary {
    pub fn new(system: SystemSummary) -> Self {
        Summary {
            system,
            hypotheses: Vec::new(),
            bounds: Vec::new(),
            checks: Vec::new(),
            solver: Vec::new(),
        }
    }

    /// Whether any bound check has a margin below `-tolerance`.
    pub fn has_violation(&self) -> bool {
        self.checks.iter().any(|c| !c.satisfied)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSummary {
    pub command: CommandKind,
    pub model: String,
    /// Competition parameters; absent for custom systems.
    pub params: Option<Lv2Params>,
    pub d: Vec<f64>,
    pub lower_thresholds: Option<Vec<f64>>,
    pub upper_thresholds: Option<Vec<f64>>,
    pub seed: u64,
    pub tolerance: f64,
}

/// A closed-form bound value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    /// `lower_product`, `upper_sum`, `upper_product`, `linear_lv_lower` or
    /// `linear_lv_upper`.
    pub kind: &'static str,
    pub value: f64,
    /// Natural log of `value`, computed directly for the lower product
    /// bound so it survives when `value` under- or overflows.
    pub log_value: f64,
    pub levels: Option<BarrierLevels>,
    pub params: Option<BoundParams>,
}

/// One pointwise bound check along a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    /// Index of the profile in `solver` the check ran on.
    pub step: usize,
    #[serde(flatten)]
    pub report: BoundCheckReport,
    pub satisfied: bool,
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn new(step: usize, report: BoundCheckReport, tolerance: f64) -> Self {
        CheckRecord {
            step,
            satisfied: report.satisfied(tolerance),
            report,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSource {
    Solve,
    File,
    Continuation,
}

/// A solved or loaded profile, without its node values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRecord {
    pub step: usize,
    /// Continuation parameter value; absent outside `sweep`.
    pub value: Option<f64>,
    pub source: ProfileSource,
    /// CSV file the profile was written to or read from.
    pub path: Option<String>,
    pub left: String,
    pub right: String,
    pub theta: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub h: f64,
    pub nodes: usize,
    pub classification: Option<SolutionClass>,
}

impl ProfileRecord {
    pub fn new(step: usize, source: ProfileSource, profile: &WaveProfile) -> Self {
        ProfileRecord {
            step,
            value: None,
            source,
            path: None,
            left: profile.left.label.as_str().to_string(),
            right: profile.right.label.as_str().to_string(),
            theta: profile.theta,
            residual_norm: profile.residual_norm,
            iterations: profile.iterations,
            half_length: profile.half_length(),
            h: profile.spacing(),
            nodes: profile.nodes(),
            classification: None,
        }
    }
}

/// Writes `summary` as pretty JSON to `path`, or to standard output.
pub fn write_summary_json(summary: &Summary, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).context("serializing summary")?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing summary {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing summary to standard output")
        }
    }
}
