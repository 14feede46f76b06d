//! Sign hypotheses on the reaction factors.
//!
//! H1: `f_i >= 0` on the inner simplex `{u >= 0, sum u_i / lower_i <= 1}`.
//! H2: `f_i <= 0` on the outer region `{u >= 0, sum u_i / upper_i >= 1}`.
//!
//! Affine reactions are decided exactly from vertex values. Anything else
//! falls back to seeded sampling, which can refute but never prove.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::model::SystemSpec;
use crate::model::HypothesisRegion;
use crate::sampling;
use crate::Result;

/// Slack for vertex and sample values; absorbs rounding such as
/// `1 - a * (1/a)` at region boundaries.
pub const SIGN_TOL: f64 = 1e-12;

/// Residual allowed in the superposition probes that detect affine `f`.
pub const AFFINE_TOL: f64 = 1e-10;

/// Default box factor bounding the sampled part of the H2 region.
pub const DEFAULT_BOX_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Hypothesis {
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    AffineExact,
    Sampling,
}

/// How a check may decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Exact vertex test when the reaction is affine, sampling otherwise.
    #[default]
    Auto,
    /// Always sample.
    Sampling,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisReport {
    pub hypothesis: Hypothesis,
    pub holds: bool,
    pub method: Method,
    /// Point with the most violating `f_i` (smallest for H1, largest for H2).
    pub worst_point: Vec<f64>,
    pub worst_value: f64,
    pub samples_used: usize,
    pub seed: u64,
    /// Sampling box factor for H2; `None` for H1.
    pub box_factor: Option<f64>,
}

impl HypothesisReport {
    /// Affine verdicts are proofs; sampling verdicts only refute.
    pub fn conclusive(&self) -> bool {
        self.method == Method::AffineExact || !self.holds
    }
}

/// Affine model of the reaction: `f(u) = base + slopes * u`,
/// `slopes` row-major `n x n`.
#[derive(Debug, Clone)]
struct AffineModel {
    base: Vec<f64>,
    slopes: Vec<f64>,
}

/// Probes `f` at `0`, `s_i e_i` and `s_i e_i + s_j e_j` (including `i == j`)
/// plus one interior point, where `s` is the region scale. Returns the affine
/// model when every superposition residual is below [`AFFINE_TOL`].
fn detect_affine(spec: &SystemSpec, scale: &[f64]) -> Option<AffineModel> {
    let n = spec.n();
    let r = spec.reaction();
    let mut base = vec![0.0; n];
    r.eval(&vec![0.0; n], &mut base);

    let mut at_axis = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    let mut out = vec![0.0; n];
    for j in 0..n {
        point[j] = scale[j];
        r.eval(&point, &mut out);
        point[j] = 0.0;
        at_axis[j * n..(j + 1) * n].copy_from_slice(&out);
    }
    let mut magnitude = base.iter().map(|x| x.abs()).fold(1.0, f64::max);
    magnitude = at_axis.iter().map(|x| x.abs()).fold(magnitude, f64::max);
    let tol = AFFINE_TOL * magnitude;

    let predicted = |coeff: &[f64], i: usize| -> f64 {
        base[i]
            + (0..n)
                .map(|j| coeff[j] * (at_axis[j * n + i] - base[i]))
                .sum::<f64>()
    };
    let mut coeff = vec![0.0; n];
    let mut check = |coeff: &[f64]| -> bool {
        for (j, c) in coeff.iter().enumerate() {
            point[j] = c * scale[j];
        }
        r.eval(&point, &mut out);
        (0..n).all(|i| (out[i] - predicted(coeff, i)).abs() <= tol)
    };
    for i in 0..n {
        for j in i..n {
            coeff.iter_mut().for_each(|c| *c = 0.0);
            coeff[i] += 1.0;
            coeff[j] += 1.0;
            if !check(&coeff) {
                return None;
            }
        }
    }
    // an interior point with incommensurate weights catches periodic terms
    for (j, c) in coeff.iter_mut().enumerate() {
        *c = core::f64::consts::FRAC_1_PI + 0.2071067811865476 * j as f64;
    }
    if !check(&coeff) {
        return None;
    }

    let mut slopes = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            slopes[i * n + j] = (at_axis[j * n + i] - base[i]) / scale[j];
        }
    }
    Some(AffineModel { base, slopes })
}

/// Tracks the most violating value; ties keep the lexicographically
/// smallest point.
struct Worst {
    point: Vec<f64>,
    value: f64,
    minimize: bool,
}

impl Worst {
    fn new(n: usize, minimize: bool) -> Self {
        Worst {
            point: vec![0.0; n],
            value: if minimize { f64::INFINITY } else { f64::NEG_INFINITY },
            minimize,
        }
    }

    fn offer(&mut self, point: &[f64], value: f64) {
        let better = if self.minimize {
            value < self.value
        } else {
            value > self.value
        };
        let tie = value == self.value && point < self.point.as_slice();
        if better || tie {
            self.value = value;
            self.point.clear();
            self.point.extend_from_slice(point);
        }
    }

    fn offer_all(&mut self, point: &[f64], values: &[f64]) {
        for &v in values {
            self.offer(point, v);
        }
    }
}

fn vertex(n: usize, j: usize, t: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[j] = t;
    v
}

fn affine_eval(model: &AffineModel, u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        out[i] = model.base[i] + (0..n).map(|j| model.slopes[i * n + j] * u[j]).sum::<f64>();
    }
}

/// H1 with the default strategy.
pub fn check_h1(spec: &SystemSpec, region: &HypothesisRegion, budget: usize, seed: u64) -> Result<HypothesisReport> {
    check_h1_with(spec, region, Strategy::Auto, budget, seed)
}

pub fn check_h1_with(
    spec: &SystemSpec,
    region: &HypothesisRegion,
    strategy: Strategy,
    budget: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    let lower = region.lower()?;
    crate::error::check_len("lower_thresholds", spec.n(), lower.len())?;
    let n = spec.n();
    let mut worst = Worst::new(n, true);
    let mut out = vec![0.0; n];

    let affine = match strategy {
        Strategy::Auto => detect_affine(spec, lower),
        Strategy::Sampling => None,
    };
    let (method, samples_used) = if let Some(model) = affine {
        // minimum of an affine function over a simplex sits at a vertex
        let origin = vec![0.0; n];
        affine_eval(&model, &origin, &mut out);
        worst.offer_all(&origin, &out);
        for (j, &t) in lower.iter().enumerate() {
            let v = vertex(n, j, t);
            spec.reaction().eval(&v, &mut out);
            worst.offer_all(&v, &out);
        }
        (Method::AffineExact, 0)
    } else {
        let mut rng = sampling::rng(seed);
        for _ in 0..budget {
            let u = sampling::in_simplex(&mut rng, lower);
            spec.reaction().eval(&u, &mut out);
            worst.offer_all(&u, &out);
        }
        (Method::Sampling, budget)
    };

    Ok(HypothesisReport {
        hypothesis: Hypothesis::H1,
        holds: worst.value >= -SIGN_TOL,
        method,
        worst_point: worst.point,
        worst_value: worst.value,
        samples_used,
        seed,
        box_factor: None,
    })
}

/// H2 with the default strategy.
pub fn check_h2(
    spec: &SystemSpec,
    region: &HypothesisRegion,
    box_factor: f64,
    budget: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    check_h2_with(spec, region, Strategy::Auto, box_factor, budget, seed)
}

/// The exact path needs every slope nonpositive: then each `f_i` decreases
/// away from the face `sum u_i/upper_i = 1` and peaks at one of its vertices.
/// A positive slope sends the check to sampling over
/// `R ∩ [0, box_factor * upper]`.
pub fn check_h2_with(
    spec: &SystemSpec,
    region: &HypothesisRegion,
    strategy: Strategy,
    box_factor: f64,
    budget: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    let upper = region.upper()?;
    crate::error::check_len("upper_thresholds", spec.n(), upper.len())?;
    if !(box_factor >= 1.0 && box_factor.is_finite()) {
        return Err(crate::Error::invalid("box_factor", "at least 1", box_factor));
    }
    let n = spec.n();
    let mut worst = Worst::new(n, false);
    let mut out = vec![0.0; n];

    let affine = match strategy {
        Strategy::Auto => detect_affine(spec, upper).filter(|m| m.slopes.iter().all(|s| *s <= 0.0)),
        Strategy::Sampling => None,
    };
    let (method, samples_used) = if affine.is_some() {
        for (j, &t) in upper.iter().enumerate() {
            let v = vertex(n, j, t);
            spec.reaction().eval(&v, &mut out);
            worst.offer_all(&v, &out);
        }
        (Method::AffineExact, 0)
    } else {
        let mut rng = sampling::rng(seed);
        let bx: Vec<f64> = upper.iter().map(|t| t * box_factor).collect();
        let mut accepted = 0;
        while accepted < budget {
            let u = sampling::in_box(&mut rng, &bx);
            let s: f64 = u.iter().zip(upper).map(|(x, t)| x / t).sum();
            if s < 1.0 {
                continue;
            }
            accepted += 1;
            spec.reaction().eval(&u, &mut out);
            worst.offer_all(&u, &out);
        }
        (Method::Sampling, budget)
    };

    Ok(HypothesisReport {
        hypothesis: Hypothesis::H2,
        holds: worst.value <= SIGN_TOL,
        method,
        worst_point: worst.point,
        worst_value: worst.value,
        samples_used,
        seed,
        box_factor: Some(box_factor),
    })
}

/// Uniform seed stream for callers that fan a master seed out to workers.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = sampling::rng(master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.random()
}
