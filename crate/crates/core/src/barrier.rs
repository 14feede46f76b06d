//! Barrier geometry behind the bounds.
//!
//! After the change of variables `U_i = ln(u_i + k_i)` (lower mode) or
//! `U_i = u_i^{m_i}` (upper mode) the functionals
//!
//! ```text
//! p = sum alpha_i U_i        q = sum alpha_i d_i U_i
//! ```
//!
//! define three surfaces `Q1 = {q = lambda1}`, `P = {p = eta}` and
//! `Q2 = {q = lambda2}`. In lower mode the sublevel sets nest as
//! `{q <= lambda1} ⊂ {p <= eta} ⊂ {q <= lambda2} ⊂ {sum u_i/lower_i <= 1}`.
//! In upper mode the superlevel sets nest the same way:
//! `{q >= lambda1} ⊂ {p >= eta} ⊂ {q >= lambda2} ⊂ {sum u_i/upper_i >= 1}`.
//!
//! Both chains follow from comparing axis intercepts, which is what
//! [`BarrierConstruction::intercepts_ordered`] checks. [`BarrierConstruction::verify_inclusion`]
//! also tries to falsify the chain by random sampling.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{self, BarrierLevels, BoundParams, Mode};
use crate::error::{check_len, check_nonnegative};
use crate::math;
use crate::sampling;
use crate::Result;

/// Relative slack for intercept comparisons in upper mode.
pub const ORDERING_RTOL: f64 = 1e-12;

/// Rounding allowance, in units of machine epsilon times the condition
/// number of the exponent, for intercept comparisons in lower mode.
pub const ORDERING_ULPS: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
enum Transform {
    /// `U_i = ln(u_i + k_i)`
    Log { k: Vec<f64> },
    /// `U_i = u_i^{m_i}`
    Power { m: Vec<f64> },
}

/// One barrier: the inputs, the transform, the levels and the thresholds of
/// the hypothesis region it must nest in.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConstruction {
    d: Vec<f64>,
    alpha: Vec<f64>,
    transform: Transform,
    levels: BarrierLevels,
    thresholds: Vec<f64>,
}

/// Axis intercepts of `Q2`, `P` and `Q1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Intercepts {
    pub u2: Vec<f64>,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
}

/// Region tags for one point; closed regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Membership {
    pub in_q1: bool,
    pub in_p: bool,
    pub in_q2: bool,
    pub in_r: bool,
}

impl Membership {
    /// `in_q1 => in_p => in_q2 => in_r`.
    pub fn chain_holds(&self) -> bool {
        (!self.in_q1 || self.in_p) && (!self.in_p || self.in_q2) && (!self.in_q2 || self.in_r)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainViolation {
    pub sample_index: usize,
    pub point: Vec<f64>,
    pub membership: Membership,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InclusionReport {
    pub mode: Mode,
    pub seed: u64,
    pub samples: usize,
    pub intercept_ordering_ok: bool,
    pub violations: Vec<ChainViolation>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.intercept_ordering_ok && self.violations.is_empty()
    }
}

impl BarrierConstruction {
    /// Lower-mode barrier with levels from [`bounds::lower_levels`].
    pub fn lower(d: &[f64], bp: &BoundParams, ulow: &[f64]) -> Result<Self> {
        let levels = bounds::lower_levels(d, bp, ulow)?;
        Ok(BarrierConstruction {
            d: d.to_vec(),
            alpha: bp.alpha.clone(),
            transform: Transform::Log { k: bp.k.clone() },
            levels,
            thresholds: ulow.to_vec(),
        })
    }

    /// Upper-mode barrier with levels from [`bounds::upper_levels`].
    pub fn upper(d: &[f64], alpha: &[f64], m: &[f64], uhigh: &[f64]) -> Result<Self> {
        let levels = bounds::upper_levels(d, alpha, m, uhigh)?;
        Ok(BarrierConstruction {
            d: d.to_vec(),
            alpha: alpha.to_vec(),
            transform: Transform::Power { m: m.to_vec() },
            levels,
            thresholds: uhigh.to_vec(),
        })
    }

    /// Replaces the levels. Only useful to build negative controls.
    pub fn with_levels(mut self, lambda2: f64, eta: f64, lambda1: f64) -> Self {
        self.levels.lambda2 = lambda2;
        self.levels.eta = eta;
        self.levels.lambda1 = lambda1;
        self
    }

    pub fn mode(&self) -> Mode {
        self.levels.mode
    }

    pub fn levels(&self) -> &BarrierLevels {
        &self.levels
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    fn transformed(&self, i: usize, ui: f64) -> f64 {
        match &self.transform {
            Transform::Log { k } => math::ln(ui + k[i]),
            Transform::Power { m } => math::pow_exp(ui, m[i]),
        }
    }

    /// `(p, q)` at a nonnegative state.
    pub fn eval_pq(&self, u: &[f64]) -> Result<(f64, f64)> {
        check_len("u", self.n(), u.len())?;
        check_nonnegative(u)?;
        Ok(self.pq_unchecked(u))
    }

    fn pq_unchecked(&self, u: &[f64]) -> (f64, f64) {
        u.iter().enumerate().fold((0.0, 0.0), |(p, q), (i, &ui)| {
            let w = self.alpha[i] * self.transformed(i, ui);
            (p + w, q + self.d[i] * w)
        })
    }

    /// Axis intercepts of the three surfaces.
    pub fn intercepts(&self) -> Intercepts {
        let n = self.n();
        let BarrierLevels {
            lambda2,
            eta,
            lambda1,
            ..
        } = self.levels;
        match &self.transform {
            Transform::Log { k } => {
                let ln_k: Vec<f64> = k.iter().map(|&x| math::ln(x)).collect();
                // sum_{i != j} w_i ln k_i
                let rest = |j: usize, weighted: bool| -> f64 {
                    (0..n)
                        .filter(|&i| i != j)
                        .map(|i| self.alpha[i] * if weighted { self.d[i] } else { 1.0 } * ln_k[i])
                        .sum()
                };
                let on_q = |level: f64, j: usize| {
                    math::exp((level - rest(j, true)) / (self.alpha[j] * self.d[j])) - k[j]
                };
                Intercepts {
                    u2: (0..n).map(|j| on_q(lambda2, j)).collect(),
                    u0: (0..n)
                        .map(|j| math::exp((eta - rest(j, false)) / self.alpha[j]) - k[j])
                        .collect(),
                    u1: (0..n).map(|j| on_q(lambda1, j)).collect(),
                }
            }
            Transform::Power { m } => {
                let root = |x: f64, j: usize| {
                    if m[j] == 1.0 {
                        x
                    } else {
                        math::powf(x, 1.0 / m[j])
                    }
                };
                Intercepts {
                    u2: (0..n)
                        .map(|j| root(lambda2 / (self.alpha[j] * self.d[j]), j))
                        .collect(),
                    u0: (0..n).map(|j| root(eta / self.alpha[j], j)).collect(),
                    u1: (0..n)
                        .map(|j| root(lambda1 / (self.alpha[j] * self.d[j]), j))
                        .collect(),
                }
            }
        }
    }

    /// Whether the intercepts nest as required for this mode: lower mode
    /// `u1 <= u0 <= u2 <= lower`, upper mode `u1 >= u0 >= u2 >= upper`.
    ///
    /// The intercept of the species attaining each minimum coincides with
    /// its neighbour in exact arithmetic, so comparisons allow for the
    /// rounding of the formulas. In lower mode an intercept is
    /// `exp(E) - k_j` where `E` is a difference of sums of `ln` terms divided
    /// by `alpha_j d_j`; its absolute error is about `(u + k_j)` times the
    /// error of `E`, which is bounded from the magnitudes of those terms.
    pub fn intercepts_ordered(&self, ic: &Intercepts) -> bool {
        let n = self.n();
        let slack: Vec<f64> = match &self.transform {
            Transform::Log { k } => {
                let dmin = self.d.iter().copied().fold(f64::INFINITY, f64::min);
                let dmax = self.d.iter().copied().fold(0.0, f64::max);
                let magnitude: f64 = (0..n)
                    .map(|i| {
                        let ln_k = math::ln(k[i]).abs();
                        let ln_t = math::ln(self.thresholds[i] + k[i]).abs();
                        self.alpha[i] * (1.0 + self.d[i]) * (ln_k + ln_t)
                    })
                    .sum::<f64>()
                    * (1.0 + dmax / dmin);
                (0..n)
                    .map(|j| ORDERING_ULPS * f64::EPSILON * magnitude / (self.alpha[j] * self.d[j].min(1.0)))
                    .collect()
            }
            Transform::Power { .. } => vec![ORDERING_RTOL; n],
        };
        let shift = |j: usize| match &self.transform {
            Transform::Log { k } => k[j],
            Transform::Power { .. } => 0.0,
        };
        let le = |a: f64, b: f64, j: usize| a <= b + slack[j] * (a.abs() + b.abs() + 2.0 * shift(j));
        (0..n).all(|j| {
            let t = self.thresholds[j];
            match self.mode() {
                Mode::Lower => le(ic.u1[j], ic.u0[j], j) && le(ic.u0[j], ic.u2[j], j) && le(ic.u2[j], t, j),
                Mode::Upper => le(ic.u0[j], ic.u1[j], j) && le(ic.u2[j], ic.u0[j], j) && le(t, ic.u2[j], j),
            }
        })
    }

    /// Region tags at a nonnegative state.
    pub fn membership(&self, u: &[f64]) -> Result<Membership> {
        check_len("u", self.n(), u.len())?;
        check_nonnegative(u)?;
        Ok(self.membership_unchecked(u))
    }

    fn membership_unchecked(&self, u: &[f64]) -> Membership {
        let (p, q) = self.pq_unchecked(u);
        let simplex: f64 = u.iter().zip(&self.thresholds).map(|(x, t)| x / t).sum();
        let l = &self.levels;
        match self.mode() {
            Mode::Lower => Membership {
                in_q1: q <= l.lambda1,
                in_p: p <= l.eta,
                in_q2: q <= l.lambda2,
                in_r: simplex <= 1.0,
            },
            Mode::Upper => Membership {
                in_q1: q >= l.lambda1,
                in_p: p >= l.eta,
                in_q2: q >= l.lambda2,
                in_r: simplex >= 1.0,
            },
        }
    }

    /// Checks the intercept ordering, then samples `samples` points uniformly
    /// from `[0, 2 max threshold]^n` and records every point whose tags break
    /// the chain. Violations are listed by sample index.
    pub fn verify_inclusion(&self, samples: usize, seed: u64) -> InclusionReport {
        let intercept_ordering_ok = self.intercepts_ordered(&self.intercepts());
        let top = 2.0 * self.thresholds.iter().copied().fold(0.0, f64::max);
        let upper = vec![top; self.n()];
        let mut rng = sampling::rng(seed);
        let mut violations = Vec::new();
        for sample_index in 0..samples {
            let point = sampling::in_box(&mut rng, &upper);
            let membership = self.membership_unchecked(&point);
            if !membership.chain_holds() {
                violations.push(ChainViolation {
                    sample_index,
                    point,
                    membership,
                });
            }
        }
        InclusionReport {
            mode: self.mode(),
            seed,
            samples,
            intercept_ordering_ok,
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::LN_2;

    fn lower_example(d: &[f64]) -> BarrierConstruction {
        let bp = BoundParams::lower(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        BarrierConstruction::lower(d, &bp, &[1.0, 1.0]).unwrap()
    }

    fn upper_example() -> BarrierConstruction {
        BarrierConstruction::upper(&[1.0, 2.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn pq_values() {
        assert_eq!(lower_example(&[1.0, 1.0]).eval_pq(&[0.0, 0.0]).unwrap(), (0.0, 0.0));
        let (p, q) = lower_example(&[1.0, 2.0]).eval_pq(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(p, 2.0 * LN_2, max_relative = 1e-15);
        assert_relative_eq!(q, 3.0 * LN_2, max_relative = 1e-15);
        let (p, q) = upper_example().eval_pq(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_relative_eq!(p, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(q, 1.0, max_relative = 1e-15);
        assert!(upper_example().eval_pq(&[1.0]).is_err());
    }

    #[test]
    fn intercepts_values() {
        let ic = lower_example(&[1.0, 1.0]).intercepts();
        for v in ic.u2.iter().chain(&ic.u0).chain(&ic.u1) {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
        }
        let ic = lower_example(&[1.0, 2.0]).intercepts();
        let s2 = 2f64.sqrt();
        let q2 = 2f64.powf(0.25);
        let expect = [
            (&ic.u2, [1.0, s2 - 1.0]),
            (&ic.u0, [s2 - 1.0, s2 - 1.0]),
            (&ic.u1, [s2 - 1.0, q2 - 1.0]),
        ];
        for (got, want) in expect {
            assert_relative_eq!(got[0], want[0], max_relative = 1e-13);
            assert_relative_eq!(got[1], want[1], max_relative = 1e-13);
        }
        let ic = upper_example().intercepts();
        assert_eq!(ic.u2, vec![2.0, 1.0]);
        assert_eq!(ic.u0, vec![2.0, 2.0]);
        assert_eq!(ic.u1, vec![4.0, 2.0]);
    }

    #[test]
    fn membership_tags() {
        let all = Membership {
            in_q1: true,
            in_p: true,
            in_q2: true,
            in_r: true,
        };
        let c = lower_example(&[1.0, 2.0]);
        assert_eq!(c.membership(&[0.0, 0.0]).unwrap(), all);
        let none = Membership {
            in_q1: false,
            in_p: false,
            in_q2: false,
            in_r: false,
        };
        assert_eq!(c.membership(&[1.0, 1.0]).unwrap(), none);
        assert_eq!(upper_example().membership(&[4.0, 4.0]).unwrap(), all);
    }

    #[test]
    fn inclusion_holds_for_theorem_levels() {
        let r = lower_example(&[1.0, 2.0]).verify_inclusion(100_000, 1);
        assert!(r.intercept_ordering_ok);
        assert!(r.violations.is_empty());
        let r = upper_example().verify_inclusion(100_000, 2);
        assert!(r.passed());
        assert_eq!(r.seed, 2);
    }

    #[test]
    fn corrupted_levels_are_caught() {
        let c = lower_example(&[1.0, 2.0]);
        let l = *c.levels();
        let bad = c.with_levels(l.lambda2, l.eta, l.lambda2 + 1.0);
        let r = bad.verify_inclusion(10_000, 3);
        assert!(!r.intercept_ordering_ok);
        assert!(!r.violations.is_empty());
        assert!(r.violations.windows(2).all(|w| w[0].sample_index < w[1].sample_index));
    }
}
