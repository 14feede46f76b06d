//! The five subcommands.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nbarrier_core::bounds::{linear_lv_bounds, lower_levels, upper_bound_product, upper_bound_sum, upper_levels};
use nbarrier_core::hypotheses::{check_h1, check_h2};
use nbarrier_core::model::lv2_system;
use nbarrier_core::solver::{continuation, solve_fixed_speed, solve_free_speed, Speed};
use nbarrier_core::verify::{check_linear_lv, check_lower_bound, check_upper_bounds, classify_profile, CLASSIFY_TOL};
use nbarrier_core::{BoundParams, Lv2System, WaveProfile};

use crate::config::{region, CommandKind, RunConfig};
use crate::profile_csv::{read_profile_csv, write_profile_csv};
use crate::summary::{BoundValue, CheckRecord, ProfileRecord, ProfileSource, Summary, SystemSummary};

/// A finished command. `failure` carries an error raised after part of the
/// summary was produced; the summary is still written.
pub struct Outcome {
    pub summary: Summary,
    pub failure: Option<anyhow::Error>,
}

impl From<Summary> for Outcome {
    fn from(summary: Summary) -> Self {
        Outcome { summary, failure: None }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Bounds => bounds(cfg).map(Into::into),
        CommandKind::Hypothesis => hypothesis(cfg).map(Into::into),
        CommandKind::Solve => solve(cfg).map(Into::into),
        CommandKind::Check => check(cfg).map(Into::into),
        CommandKind::Sweep => sweep(cfg),
    }
}

fn lv2_summary(cfg: &RunConfig, sys: &Lv2System) -> SystemSummary {
    SystemSummary {
        command: cfg.command,
        model: cfg.model_name().to_string(),
        params: Some(sys.params),
        d: sys.spec.d().to_vec(),
        lower_thresholds: sys.region.lower.clone(),
        upper_thresholds: sys.region.upper.clone(),
        seed: cfg.seed(),
        tolerance: cfg.tol(),
    }
}

fn require_lv2(cfg: &RunConfig) -> Result<Lv2System> {
    if cfg.model_name() == "custom" {
        bail!("`model` custom has no reaction terms and only supports `bounds`");
    }
    cfg.lv2()
}

fn bounds(cfg: &RunConfig) -> Result<Summary> {
    let o = &cfg.options;
    let (mut summary, region, lv) = if cfg.model_name() == "custom" {
        let d = o.d.clone().ok_or_else(|| anyhow!("`model` custom needs `d`"))?;
        if o.lower.is_none() && o.upper.is_none() {
            bail!("`model` custom needs `lower` or `upper` thresholds");
        }
        let region = region(o.lower.clone(), o.upper.clone(), d.len())?;
        let system = SystemSummary {
            command: cfg.command,
            model: "custom".into(),
            params: None,
            d,
            lower_thresholds: region.lower.clone(),
            upper_thresholds: region.upper.clone(),
            seed: cfg.seed(),
            tolerance: cfg.tol(),
        };
        (Summary::new(system), region, None)
    } else {
        let sys = cfg.lv2()?;
        (Summary::new(lv2_summary(cfg, &sys)), sys.region.clone(), Some(sys.params))
    };
    let d = summary.system.d.clone();
    let n = d.len();
    let alpha = cfg.vector_or_ones("alpha", &o.alpha, n)?;
    let k = cfg.vector_or_ones("k", &o.k, n)?;
    let m = cfg.vector_or_ones("m", &o.m, n)?;

    if let Some(lower) = &region.lower {
        let bp = BoundParams::lower(k.clone(), alpha.clone())?;
        let levels = lower_levels(&d, &bp, lower)?;
        summary.bounds.push(BoundValue {
            kind: "lower_product",
            value: levels.lambda1.exp(),
            log_value: levels.lambda1,
            levels: Some(levels),
            params: Some(bp),
        });
    }
    if let Some(upper) = &region.upper {
        let bp = BoundParams::upper(alpha.clone(), m.clone())?;
        let levels = upper_levels(&d, &alpha, &m, upper)?;
        for (kind, value) in [
            ("upper_sum", upper_bound_sum(&d, &alpha, &m, upper)?),
            ("upper_product", upper_bound_product(&d, &alpha, &m, upper)?),
        ] {
            summary.bounds.push(BoundValue {
                kind,
                value,
                log_value: value.ln(),
                levels: Some(levels),
                params: Some(bp.clone()),
            });
        }
    }
    if let Some(p) = lv {
        let (lo, hi) = linear_lv_bounds(k[0], k[1], p.a1, p.a2)?;
        let bp = BoundParams::new(k.clone(), vec![1.0; 2], vec![1.0; 2])?;
        for (kind, value) in [("linear_lv_lower", lo), ("linear_lv_upper", hi)] {
            summary.bounds.push(BoundValue {
                kind,
                value,
                log_value: value.ln(),
                levels: None,
                params: Some(bp.clone()),
            });
        }
    }
    Ok(summary)
}

fn hypothesis(cfg: &RunConfig) -> Result<Summary> {
    let sys = require_lv2(cfg)?;
    let mut summary = Summary::new(lv2_summary(cfg, &sys));
    summary.hypotheses.push(check_h1(&sys.spec, &sys.region, cfg.budget(), cfg.seed())?);
    summary
        .hypotheses
        .push(check_h2(&sys.spec, &sys.region, cfg.box_factor(), cfg.budget(), cfg.seed())?);
    Ok(summary)
}

/// Records `profile` and runs every applicable check on it.
fn record_profile(
    cfg: &RunConfig,
    summary: &mut Summary,
    sys: &Lv2System,
    profile: &WaveProfile,
    mut record: ProfileRecord,
    with_checks: bool,
) -> Result<()> {
    let spec = sys.spec.with_theta(profile.theta);
    record.classification = Some(classify_profile(profile, &spec, CLASSIFY_TOL)?);
    summary.solver.push(record);
    if !with_checks {
        return Ok(());
    }
    let step = summary.solver.len() - 1;
    let n = spec.n();
    let o = &cfg.options;
    let alpha = cfg.vector_or_ones("alpha", &o.alpha, n)?;
    let k = cfg.vector_or_ones("k", &o.k, n)?;
    let m = cfg.vector_or_ones("m", &o.m, n)?;
    let tol = cfg.tol();
    if sys.region.lower.is_some() {
        let bp = BoundParams::lower(k.clone(), alpha.clone())?;
        let r = check_lower_bound(profile, &spec, &sys.region, &bp)?;
        summary.checks.push(CheckRecord::new(step, r, tol));
    }
    if sys.region.upper.is_some() {
        let (sum, product) = check_upper_bounds(profile, &spec, &sys.region, &alpha, &m)?;
        summary.checks.push(CheckRecord::new(step, sum, tol));
        summary.checks.push(CheckRecord::new(step, product, tol));
    }
    let r = check_linear_lv(profile, sys.params.a1, sys.params.a2, k[0], k[1])?;
    summary.checks.push(CheckRecord::new(step, r, tol));
    Ok(())
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn solve(cfg: &RunConfig) -> Result<Summary> {
    let sys = require_lv2(cfg)?;
    let solve_cfg = cfg.solve_config()?;
    let (l, r) = cfg.wave()?;
    let find = |label| {
        sys.equilibrium(label)
            .ok_or_else(|| anyhow!("`wave` state {label} does not exist for these parameters"))
    };
    let (left, right) = (find(l)?, find(r)?);
    let profile = if cfg.free_speed() {
        solve_free_speed(&sys.spec, left, right, &solve_cfg, None)
    } else {
        solve_fixed_speed(&sys.spec, left, right, &solve_cfg, None)
    }
    .context("solving for the wave")?;
    let mut record = ProfileRecord::new(0, ProfileSource::Solve, &profile);
    if let Some(out) = &cfg.options.out {
        write_profile_csv(&profile, out)?;
        record.path = Some(path_string(out));
    }
    let mut summary = Summary::new(lv2_summary(cfg, &sys));
    record_profile(cfg, &mut summary, &sys, &profile, record, false)?;
    Ok(summary)
}

fn check(cfg: &RunConfig) -> Result<Summary> {
    let sys = require_lv2(cfg)?;
    let path = cfg.options.profile.as_ref().ok_or_else(|| anyhow!("missing `profile`"))?;
    let profile = read_profile_csv(path)?;
    if profile.species() != 2 {
        bail!("`profile` has {} species, the competition system has 2", profile.species());
    }
    let mut record = ProfileRecord::new(0, ProfileSource::File, &profile);
    record.path = Some(path_string(path));
    let mut summary = Summary::new(lv2_summary(cfg, &sys));
    record_profile(cfg, &mut summary, &sys, &profile, record, true)?;
    Ok(summary)
}

fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let base_sys = require_lv2(cfg)?;
    let param = cfg.continuation_param()?;
    let schedule = cfg.options.schedule.clone().ok_or_else(|| anyhow!("missing `schedule`"))?;
    if schedule.is_empty() {
        bail!("`schedule` is empty");
    }
    let solve_cfg = cfg.solve_config()?;
    let (l, r) = cfg.wave()?;
    let speed = if cfg.free_speed() { Speed::Free } else { Speed::Fixed };
    if let Some(dir) = &cfg.options.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let (profiles, failure) = match continuation(base_sys.params, param, &schedule, l, r, &solve_cfg, speed) {
        Ok(p) => (p, None),
        Err(e) => {
            // the message already names the cause; keep the chain flat
            let failure = anyhow!("{e}");
            (e.completed, Some(failure))
        }
    };
    let mut summary = Summary::new(lv2_summary(cfg, &base_sys));
    for (step, profile) in profiles.iter().enumerate() {
        let value = schedule[step];
        let mut sys = lv2_system(param.apply(base_sys.params, value))?;
        sys.region = cfg.region_over(&sys.region)?;
        let mut record = ProfileRecord::new(step, ProfileSource::Continuation, profile);
        record.value = Some(value);
        if let Some(dir) = &cfg.options.out {
            let path = dir.join(format!("step-{step}.csv"));
            write_profile_csv(profile, &path)?;
            record.path = Some(path_string(&path));
        }
        record_profile(cfg, &mut summary, &sys, profile, record, true)?;
    }
    Ok(Outcome { summary, failure })
}
