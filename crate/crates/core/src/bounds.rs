//! Closed-form a priori bounds.
//!
//! Lower bounds hold for nonnegative upper solutions when the reaction terms
//! are nonnegative on the inner simplex `sum u_i / lower_i <= 1`:
//!
//! ```text
//! prod_i (u_i + k_i)^(d_i alpha_i) >= exp(lambda1)
//! ```
//!
//! Note the exponent is `d_i alpha_i`, not `alpha_i`. Only with equal
//! diffusion `d` does taking the `1/d`-th root reduce it to plain `alpha_i`
//! (see [`lower_bound_equal_diffusion`]).
//!
//! Upper bounds hold for nonnegative lower solutions when the reaction terms
//! are nonpositive on `sum u_i / upper_i >= 1`:
//!
//! ```text
//! sum_i alpha_i u_i^(m_i) <= max_i(alpha_i upper_i^(m_i)) * max d / min d
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, check_nonnegative, check_positive};
use crate::math;
use crate::{Error, Result};

/// Which side of the solution a barrier bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    Lower,
    Upper,
}

/// User weights: shifts `k` (lower bounds), weights `alpha`, exponents `m`
/// (upper bounds).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundParams {
    pub k: Vec<f64>,
    pub alpha: Vec<f64>,
    pub m: Vec<f64>,
}

impl BoundParams {
    pub fn new(k: Vec<f64>, alpha: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        check_len("alpha", k.len(), alpha.len())?;
        check_len("m", k.len(), m.len())?;
        check_positive("k", &k)?;
        check_positive("alpha", &alpha)?;
        check_exponents(&m)?;
        Ok(BoundParams { k, alpha, m })
    }

    /// Parameters for the lower bound; `m` is set to ones.
    pub fn lower(k: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let m = vec![1.0; k.len()];
        Self::new(k, alpha, m)
    }

    /// Parameters for the upper bounds; `k` is set to ones.
    pub fn upper(alpha: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        let k = vec![1.0; alpha.len()];
        Self::new(k, alpha, m)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }
}

/// The three barrier levels, computed in the order `lambda2`, `eta`,
/// `lambda1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierLevels {
    pub lambda2: f64,
    pub eta: f64,
    pub lambda1: f64,
    pub mode: Mode,
}

fn check_exponents(m: &[f64]) -> Result<()> {
    match m.iter().find(|x| !(**x >= 1.0 && x.is_finite())) {
        Some(&v) => Err(Error::invalid("m", "at least 1", v)),
        None => Ok(()),
    }
}

fn check_lower_inputs(d: &[f64], bp: &BoundParams, ulow: &[f64]) -> Result<()> {
    check_len("d", bp.n(), d.len())?;
    check_len("lower_thresholds", bp.n(), ulow.len())?;
    check_positive("d", d)?;
    check_positive("k", &bp.k)?;
    check_positive("alpha", &bp.alpha)?;
    check_positive("lower_thresholds", ulow)
}

fn check_upper_inputs(d: &[f64], alpha: &[f64], m: &[f64], uhigh: &[f64]) -> Result<()> {
    check_len("d", alpha.len(), d.len())?;
    check_len("m", alpha.len(), m.len())?;
    check_len("upper_thresholds", alpha.len(), uhigh.len())?;
    check_positive("d", d)?;
    check_positive("alpha", alpha)?;
    check_exponents(m)?;
    check_positive("upper_thresholds", uhigh)
}

fn min_over<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    (0..n).map(f).fold(f64::INFINITY, f64::min)
}

/// Lower-bound levels.
///
/// ```text
/// lambda2 = min_j ( alpha_j d_j ln(lower_j + k_j) + sum_{i!=j} alpha_i d_i ln k_i )
/// eta     = min_j ( lambda2 - sum_{i!=j} alpha_i (d_i - d_j) ln k_i ) / d_j
/// lambda1 = min_j ( eta d_j + sum_{i!=j} alpha_i (d_i - d_j) ln k_i )
/// ```
pub fn lower_levels(d: &[f64], bp: &BoundParams, ulow: &[f64]) -> Result<BarrierLevels> {
    check_lower_inputs(d, bp, ulow)?;
    let n = d.len();
    let ln_k: Vec<f64> = bp.k.iter().map(|&k| math::ln(k)).collect();
    let cross = |j: usize| -> f64 {
        (0..n)
            .filter(|&i| i != j)
            .map(|i| bp.alpha[i] * (d[i] - d[j]) * ln_k[i])
            .sum()
    };

    let lambda2 = min_over(n, |j| {
        let others: f64 = (0..n)
            .filter(|&i| i != j)
            .map(|i| bp.alpha[i] * d[i] * ln_k[i])
            .sum();
        bp.alpha[j] * d[j] * math::ln(ulow[j] + bp.k[j]) + others
    });
    let eta = min_over(n, |j| (lambda2 - cross(j)) / d[j]);
    let lambda1 = min_over(n, |j| eta * d[j] + cross(j));

    Ok(BarrierLevels {
        lambda2,
        eta,
        lambda1,
        mode: Mode::Lower,
    })
}

/// `exp(lambda1)`: lower bound for `prod_i (u_i + k_i)^(d_i alpha_i)`.
pub fn lower_bound_value(d: &[f64], bp: &BoundParams, ulow: &[f64]) -> Result<f64> {
    Ok(math::exp(lower_levels(d, bp, ulow)?.lambda1))
}

/// Equal-diffusion form: lower bound for `prod_i (u_i + k_i)^alpha_i`,
///
/// ```text
/// min_j (lower_j + k_j)^alpha_j prod_{i!=j} k_i^alpha_i
/// ```
///
/// which equals `lower_bound_value(d = (d, ..., d))^(1/d)` for any `d > 0`.
pub fn lower_bound_equal_diffusion(bp: &BoundParams, ulow: &[f64]) -> Result<f64> {
    check_len("lower_thresholds", bp.n(), ulow.len())?;
    check_positive("k", &bp.k)?;
    check_positive("alpha", &bp.alpha)?;
    check_positive("lower_thresholds", ulow)?;
    let n = bp.n();
    Ok(min_over(n, |j| {
        (0..n).fold(1.0, |acc, i| {
            let base = if i == j { ulow[i] + bp.k[i] } else { bp.k[i] };
            acc * math::pow_exp(base, bp.alpha[i])
        })
    }))
}

/// Upper-bound levels.
///
/// ```text
/// lambda2 = max_i alpha_i d_i upper_i^(m_i)
/// eta     = lambda2 / min d
/// lambda1 = eta * max d
/// ```
///
/// `lambda1` bounds `q = sum alpha_i d_i u_i^(m_i)`.
pub fn upper_levels(d: &[f64], alpha: &[f64], m: &[f64], uhigh: &[f64]) -> Result<BarrierLevels> {
    check_upper_inputs(d, alpha, m, uhigh)?;
    let lambda2 = (0..d.len())
        .map(|i| alpha[i] * d[i] * math::pow_exp(uhigh[i], m[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    let eta = lambda2 / min_of(d);
    let lambda1 = eta * max_of(d);
    Ok(BarrierLevels {
        lambda2,
        eta,
        lambda1,
        mode: Mode::Upper,
    })
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Bound for `sum_i alpha_i u_i^(m_i)`.
pub fn upper_bound_sum(d: &[f64], alpha: &[f64], m: &[f64], uhigh: &[f64]) -> Result<f64> {
    check_upper_inputs(d, alpha, m, uhigh)?;
    let weighted = (0..d.len())
        .map(|i| alpha[i] * math::pow_exp(uhigh[i], m[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(weighted * max_of(d) / min_of(d))
}

/// Bound for `prod_i u_i^(m_i / n)`: the sum bound divided by
/// `n (prod alpha)^(1/n)` (arithmetic-geometric mean step).
pub fn upper_bound_product(d: &[f64], alpha: &[f64], m: &[f64], uhigh: &[f64]) -> Result<f64> {
    let sum = upper_bound_sum(d, alpha, m, uhigh)?;
    Ok(sum / (d.len() as f64 * geometric_mean(alpha)))
}

/// Product bound with equal weights: `max_i upper_i^(m_i) / n * max d / min d`.
pub fn upper_bound_product_equal_weights(d: &[f64], m: &[f64], uhigh: &[f64]) -> Result<f64> {
    let ones = vec![1.0; d.len()];
    check_upper_inputs(d, &ones, m, uhigh)?;
    let top = (0..d.len())
        .map(|i| math::pow_exp(uhigh[i], m[i]))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(top / d.len() as f64 * max_of(d) / min_of(d))
}

pub(crate) fn geometric_mean(v: &[f64]) -> f64 {
    let mean_ln = v.iter().map(|&x| math::ln(x)).sum::<f64>() / v.len() as f64;
    math::exp(mean_ln)
}

/// Bounds `(min(k2/a2, k1/a1), max(k1, k2))` on the linear form `k2 u + k1 v`
/// for two-species competition waves.
pub fn linear_lv_bounds(k1: f64, k2: f64, a1: f64, a2: f64) -> Result<(f64, f64)> {
    check_positive("k1", &[k1])?;
    check_positive("k2", &[k2])?;
    check_positive("a1", &[a1])?;
    check_positive("a2", &[a2])?;
    Ok((f64::min(k2 / a2, k1 / a1), f64::max(k1, k2)))
}

/// Diversity index `D^q = (sum u_i^q)^(1/(1-q))`, defined for `q > 1`.
pub fn diversity_index(u: &[f64], q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid("q", "greater than 1", q));
    }
    check_nonnegative(u)?;
    let s: f64 = u.iter().map(|&x| math::powf(x, q)).sum();
    if s == 0.0 {
        return Err(Error::invalid("u", "not identically zero", 0.0));
    }
    Ok(math::powf(s, 1.0 / (1.0 - q)))
}
