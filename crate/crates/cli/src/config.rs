//! Run configuration: command-line flags merged over an optional JSON file.
//!
//! Config-file keys are the long flag names (`a1`, `free-speed`, `L`, ...),
//! so a file and a command line say the same thing the same way. Flags given
//! on the command line override values from the file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nbarrier_core::model::lv2_system;
use nbarrier_core::solver::{ContinuationParam, SolveConfig};
use nbarrier_core::{EquilibriumLabel, HypothesisRegion, Lv2Params, Lv2System};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "nbarrier", version, about = "A priori bounds for traveling waves of reaction-diffusion systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Bounds,
    Hypothesis,
    Solve,
    Check,
    Sweep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every applicable closed-form bound.
    Bounds(RunArgs),
    /// Check the sign hypotheses on the reaction terms.
    Hypothesis(RunArgs),
    /// Solve for a traveling wave and write its profile.
    Solve(RunArgs),
    /// Check the bounds along a profile read from CSV.
    Check(RunArgs),
    /// Continue a wave along a parameter schedule, checking every step.
    Sweep(RunArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Bounds(a) => (CommandKind::Bounds, a),
            Command::Hypothesis(a) => (CommandKind::Hypothesis, a),
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Check(a) => (CommandKind::Check, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file whose keys are the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub options: Options,
}

/// Every setting, all optional; defaults are applied where values are used.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// `lv2`, `custom` (bounds only), or a builtin: `bistable`,
    /// `asymmetric`, `coexistence`, `near-degenerate`.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Diffusion rates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d: Option<Vec<f64>>,
    /// Thresholds of the inner region; defaults to the preset's.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lower: Option<Vec<f64>>,
    /// Thresholds of the outer region; defaults to the preset's.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub upper: Option<Vec<f64>>,
    /// Boundary states as `left-right`, e.g. `e2-e3`.
    #[arg(long)]
    pub wave: Option<String>,
    /// Treat the wave speed as an unknown.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub free_speed: Option<bool>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Half-length of the domain `[-L, L]`.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub half_length: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub newton_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Profile CSV to write (`solve`) or directory for step profiles
    /// (`sweep`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// Profile CSV to check.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Where to write the summary JSON; standard output otherwise.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample count for sampling-based checks.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub box_factor: Option<f64>,
    /// Margin below `-tol` counts as a violated bound.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Continuation parameter: `a`, `a1`, `a2` or `kappa`.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub schedule: Option<Vec<f64>>,
}

pub const DEFAULT_BUDGET: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-8;

/// A parsed command with its merged options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub options: Options,
}

impl RunConfig {
    pub fn new(command: CommandKind, args: RunArgs) -> Result<Self> {
        let options = match &args.config {
            Some(path) => merge(load_file(path)?, &args.options)?,
            None => args.options,
        };
        Ok(RunConfig { command, options })
    }

    pub fn seed(&self) -> u64 {
        self.options.seed.unwrap_or(0)
    }

    pub fn budget(&self) -> usize {
        self.options.budget.unwrap_or(DEFAULT_BUDGET)
    }

    pub fn box_factor(&self) -> f64 {
        self.options.box_factor.unwrap_or(nbarrier_core::hypotheses::DEFAULT_BOX_FACTOR)
    }

    pub fn tol(&self) -> f64 {
        self.options.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn free_speed(&self) -> bool {
        self.options.free_speed.unwrap_or(false)
    }

    /// Vector option of length `n`, or ones.
    pub fn vector_or_ones(&self, key: &str, value: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>> {
        match value {
            Some(v) if v.len() != n => bail!("`{key}` has {} entries, expected {n}", v.len()),
            Some(v) => Ok(v.clone()),
            None => Ok(vec![1.0; n]),
        }
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let o = &self.options;
        let mut cfg = SolveConfig::default();
        if let Some(l) = o.half_length {
            cfg.half_length = l;
        }
        if let Some(h) = o.h {
            cfg.spacing = h;
        }
        if let Some(t) = o.newton_tol {
            cfg.newton_tol = t;
        }
        if let Some(n) = o.max_iter {
            cfg.max_iter = n;
        }
        cfg.intervals().map_err(|e| anyhow!("{e} (`L` and `h` need 2L/h to be an even integer)"))?;
        Ok(cfg)
    }

    /// `(left, right)` labels from `wave`, default `e2-e3`.
    pub fn wave(&self) -> Result<(EquilibriumLabel, EquilibriumLabel)> {
        let text = self.options.wave.as_deref().unwrap_or("e2-e3");
        let parse = |s: &str| EquilibriumLabel::parse(s.trim());
        match text.split_once('-').map(|(a, b)| (parse(a), parse(b))) {
            Some((Some(l), Some(r))) => Ok((l, r)),
            _ => bail!("`wave` must look like `e2-e3`, got `{text}`"),
        }
    }

    pub fn continuation_param(&self) -> Result<ContinuationParam> {
        match self.options.param.as_deref() {
            Some("a") => Ok(ContinuationParam::A),
            Some("a1") => Ok(ContinuationParam::A1),
            Some("a2") => Ok(ContinuationParam::A2),
            Some("kappa") => Ok(ContinuationParam::Kappa),
            Some(other) => bail!("`param` must be one of a, a1, a2, kappa; got `{other}`"),
            None => bail!("missing `param`"),
        }
    }

    pub fn model_name(&self) -> &str {
        self.options.model.as_deref().unwrap_or("lv2")
    }

    /// Competition parameters: builtin values overridden by explicit ones.
    pub fn lv2_params(&self) -> Result<Lv2Params> {
        let o = &self.options;
        let builtin = match self.model_name() {
            "lv2" => None,
            "bistable" => Some((2.0, 2.0)),
            "asymmetric" => Some((2.0, 4.0)),
            "coexistence" => Some((0.5, 0.5)),
            "near-degenerate" => Some((1.01, 1.01)),
            other => bail!("`model` must be lv2, custom or a builtin (bistable, asymmetric, coexistence, near-degenerate); got `{other}`"),
        };
        let a1 = o.a1.or(builtin.map(|b| b.0)).ok_or_else(|| anyhow!("missing `a1`"))?;
        let a2 = o.a2.or(builtin.map(|b| b.1)).ok_or_else(|| anyhow!("missing `a2`"))?;
        let mut p = Lv2Params::new(a1, a2, o.kappa.unwrap_or(1.0));
        if let Some(d) = &o.d {
            if d.len() != 2 {
                bail!("`d` has {} entries, expected 2", d.len());
            }
            p.d1 = d[0];
            p.d2 = d[1];
        }
        p.theta = o.theta.unwrap_or(0.0);
        p.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(p)
    }

    /// The competition system with any threshold overrides applied.
    pub fn lv2(&self) -> Result<Lv2System> {
        let mut sys = lv2_system(self.lv2_params()?).map_err(|e| anyhow!("{e}"))?;
        sys.region = self.region_over(&sys.region)?;
        Ok(sys)
    }
}

impl RunConfig {
    /// `preset` with any `lower` / `upper` thresholds given replacing it.
    pub fn region_over(&self, preset: &HypothesisRegion) -> Result<HypothesisRegion> {
        if self.options.lower.is_none() && self.options.upper.is_none() {
            return Ok(preset.clone());
        }
        let lower = self.options.lower.clone().or_else(|| preset.lower.clone());
        let upper = self.options.upper.clone().or_else(|| preset.upper.clone());
        region(lower, upper, 2)
    }
}

/// Validated thresholds with the field named on error.
pub fn region(lower: Option<Vec<f64>>, upper: Option<Vec<f64>>, n: usize) -> Result<HypothesisRegion> {
    for (key, v) in [("lower", &lower), ("upper", &upper)] {
        if let Some(v) = v {
            if v.len() != n {
                bail!("`{key}` has {} entries, expected {n}", v.len());
            }
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                bail!("`{key}` entries must be positive");
            }
        }
    }
    HypothesisRegion::new(lower, upper).map_err(|e| anyhow!("{e}"))
}

fn load_file(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    if !value.is_object() {
        bail!("config {} must be a JSON object", path.display());
    }
    Ok(value)
}

/// Overlays the flags that were given onto the file values.
fn merge(mut file: serde_json::Value, flags: &Options) -> Result<Options> {
    let given = serde_json::to_value(flags)?;
    let target = file.as_object_mut().expect("checked by load_file");
    for (key, value) in given.as_object().expect("struct serializes to an object") {
        if !value.is_null() {
            target.insert(key.clone(), value.clone());
        }
    }
    serde_path_to_error::deserialize(file).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("invalid config field `{path}`: {}", e.into_inner())
    })
}
