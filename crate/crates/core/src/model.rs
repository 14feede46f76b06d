//! Reaction-diffusion systems, reaction evaluators and the two-species
//! Lotka-Volterra preset.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{check_len, check_nonnegative, check_positive};
use crate::math;
use crate::{Error, Result};

/// The reaction factors `f_i` of a system; the caller applies `u_i^{l_i}`.
///
/// Implementations must be pure functions of the state.
pub trait Reaction: Send + Sync {
    /// Writes `(f_1, ..., f_n)` at `u` into `out`.
    fn eval(&self, u: &[f64], out: &mut [f64]);

    /// Row-major `n x n` matrix of `df_i / du_k` at `u`.
    ///
    /// The default uses one-sided differences away from the boundary of the
    /// orthant, so `u` with zero components stays admissible.
    fn jacobian(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let mut base = vec![0.0; n];
        let mut shifted = vec![0.0; n];
        let mut probe = u.to_vec();
        self.eval(u, &mut base);
        for k in 0..n {
            let step = 1e-7 * (1.0 + u[k].abs());
            probe[k] = u[k] + step;
            self.eval(&probe, &mut shifted);
            probe[k] = u[k];
            for i in 0..n {
                out[i * n + k] = (shifted[i] - base[i]) / step;
            }
        }
    }
}

/// Wraps a closure `Fn(&[f64], &mut [f64])` as a [`Reaction`].
pub struct FnReaction<F>(pub F);

impl<F> Reaction for FnReaction<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn eval(&self, u: &[f64], out: &mut [f64]) {
        (self.0)(u, out)
    }
}

/// Competition reaction `f_1 = 1 - u - a1 v`, `f_2 = kappa (1 - a2 u - v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotkaVolterra2 {
    pub a1: f64,
    pub a2: f64,
    pub kappa: f64,
}

impl Reaction for LotkaVolterra2 {
    fn eval(&self, u: &[f64], out: &mut [f64]) {
        out[0] = 1.0 - u[0] - self.a1 * u[1];
        out[1] = self.kappa * (1.0 - self.a2 * u[0] - u[1]);
    }

    fn jacobian(&self, _u: &[f64], out: &mut [f64]) {
        out[0] = -1.0;
        out[1] = -self.a1;
        out[2] = -self.kappa * self.a2;
        out[3] = -self.kappa;
    }
}

/// A system `d_i u_i'' + theta u_i' + u_i^{l_i} f_i(u) = 0`.
#[derive(Clone)]
pub struct SystemSpec {
    d: Vec<f64>,
    l: Vec<f64>,
    theta: f64,
    reaction: Arc<dyn Reaction>,
}

impl fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemSpec")
            .field("d", &self.d)
            .field("l", &self.l)
            .field("theta", &self.theta)
            .finish_non_exhaustive()
    }
}

impl SystemSpec {
    pub fn new(d: Vec<f64>, l: Vec<f64>, theta: f64, reaction: Arc<dyn Reaction>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::invalid("n", "at least 1", 0.0));
        }
        check_len("l", d.len(), l.len())?;
        check_positive("d", &d)?;
        check_positive("l", &l)?;
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "finite", theta));
        }
        Ok(SystemSpec {
            d,
            l,
            theta,
            reaction,
        })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn reaction(&self) -> &dyn Reaction {
        &*self.reaction
    }

    /// Same system travelling at a different speed.
    pub fn with_theta(&self, theta: f64) -> Self {
        SystemSpec {
            theta,
            ..self.clone()
        }
    }

    /// Full source term `u_i^{l_i} f_i(u)` written into `out`.
    pub(crate) fn source(&self, u: &[f64], out: &mut [f64]) {
        self.reaction.eval(u, out);
        for ((g, &ui), &li) in out.iter_mut().zip(u).zip(&self.l) {
            *g *= math::pow_exp(ui, li);
        }
    }

    /// Jacobian of the source term, row-major; `f` and `jf` are scratch of
    /// length `n` and `n * n`.
    pub(crate) fn source_jacobian(&self, u: &[f64], f: &mut [f64], out: &mut [f64]) {
        let n = self.n();
        self.reaction.eval(u, f);
        self.reaction.jacobian(u, out);
        for i in 0..n {
            let li = self.l[i];
            let w = math::pow_exp(u[i], li);
            for k in 0..n {
                out[i * n + k] *= w;
            }
            // d/du_i of u_i^{l_i}; l_i < 1 is singular at zero, clamp to finite
            let dw = if li == 1.0 {
                1.0
            } else if u[i] > 0.0 {
                li * math::powf(u[i], li - 1.0)
            } else if li > 1.0 {
                0.0
            } else {
                math::sqrt(f64::MAX)
            };
            out[i * n + i] += dw * f[i];
        }
    }
}

/// Parameters of the two-species competition model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lv2Params {
    pub a1: f64,
    pub a2: f64,
    pub kappa: f64,
    pub d1: f64,
    pub d2: f64,
    pub theta: f64,
}

impl Lv2Params {
    /// Equal diffusion `d = (1, 1)`, speed zero.
    pub fn new(a1: f64, a2: f64, kappa: f64) -> Self {
        Lv2Params {
            a1,
            a2,
            kappa,
            d1: 1.0,
            d2: 1.0,
            theta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("a1", &[self.a1])?;
        check_positive("a2", &[self.a2])?;
        check_positive("kappa", &[self.kappa])?;
        check_positive("d1", &[self.d1])?;
        check_positive("d2", &[self.d2])?;
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "finite", self.theta));
        }
        Ok(())
    }

    /// Coexistence state `((1 - a1)/(1 - a1 a2), (1 - a2)/(1 - a1 a2))` when
    /// the denominator is nonzero and both coordinates are nonnegative.
    pub fn coexistence(&self) -> Option<[f64; 2]> {
        let den = 1.0 - self.a1 * self.a2;
        if den == 0.0 {
            return None;
        }
        let u = (1.0 - self.a1) / den;
        let v = (1.0 - self.a2) / den;
        (u >= 0.0 && v >= 0.0).then_some([u, v])
    }
}

/// Thresholds of the inner simplex (for H1) and outer region (for H2).
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisRegion {
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

impl HypothesisRegion {
    pub fn new(lower: Option<Vec<f64>>, upper: Option<Vec<f64>>) -> Result<Self> {
        if let Some(l) = &lower {
            check_positive("lower_thresholds", l)?;
        }
        if let Some(u) = &upper {
            check_positive("upper_thresholds", u)?;
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            check_len("upper_thresholds", l.len(), u.len())?;
        }
        Ok(HypothesisRegion { lower, upper })
    }

    pub fn lower(&self) -> Result<&[f64]> {
        self.lower.as_deref().ok_or(Error::MissingThresholds("lower"))
    }

    pub fn upper(&self) -> Result<&[f64]> {
        self.upper.as_deref().ok_or(Error::MissingThresholds("upper"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EquilibriumLabel {
    E1,
    E2,
    E3,
    E4,
    Custom,
}

impl EquilibriumLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumLabel::E1 => "e1",
            EquilibriumLabel::E2 => "e2",
            EquilibriumLabel::E3 => "e3",
            EquilibriumLabel::E4 => "e4",
            EquilibriumLabel::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "e1" => EquilibriumLabel::E1,
            "e2" => EquilibriumLabel::E2,
            "e3" => EquilibriumLabel::E3,
            "e4" => EquilibriumLabel::E4,
            "custom" => EquilibriumLabel::Custom,
            _ => return None,
        })
    }
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Equilibrium {
    pub state: Vec<f64>,
    pub label: EquilibriumLabel,
}

impl Equilibrium {
    pub fn new(state: Vec<f64>, label: EquilibriumLabel) -> Self {
        Equilibrium { state, label }
    }
}

/// Everything the two-species preset provides.
#[derive(Debug, Clone)]
pub struct Lv2System {
    pub params: Lv2Params,
    pub spec: SystemSpec,
    pub region: HypothesisRegion,
    pub equilibria: Vec<Equilibrium>,
}

impl Lv2System {
    pub fn equilibrium(&self, label: EquilibriumLabel) -> Option<&Equilibrium> {
        self.equilibria.iter().find(|e| e.label == label)
    }
}

/// Reaction factors `(f_1, ..., f_n)` at a nonnegative state.
pub fn eval_reaction(spec: &SystemSpec, u: &[f64]) -> Result<Vec<f64>> {
    check_len("u", spec.n(), u.len())?;
    check_nonnegative(u)?;
    let mut out = vec![0.0; spec.n()];
    spec.reaction.eval(u, &mut out);
    Ok(out)
}

/// Builds the competition preset with thresholds
/// `lower = (min(1, 1/a2), min(1, 1/a1))`, `upper = (max(1, 1/a2), max(1, 1/a1))`
/// and equilibria e1, e2, e3 plus e4 when it lies in the closed quadrant.
pub fn lv2_system(p: Lv2Params) -> Result<Lv2System> {
    p.validate()?;
    let reaction = LotkaVolterra2 {
        a1: p.a1,
        a2: p.a2,
        kappa: p.kappa,
    };
    let spec = SystemSpec::new(vec![p.d1, p.d2], vec![1.0, 1.0], p.theta, Arc::new(reaction))?;
    let region = HypothesisRegion::new(
        Some(vec![f64::min(1.0, 1.0 / p.a2), f64::min(1.0, 1.0 / p.a1)]),
        Some(vec![f64::max(1.0, 1.0 / p.a2), f64::max(1.0, 1.0 / p.a1)]),
    )?;
    let mut equilibria = vec![
        Equilibrium::new(vec![0.0, 0.0], EquilibriumLabel::E1),
        Equilibrium::new(vec![1.0, 0.0], EquilibriumLabel::E2),
        Equilibrium::new(vec![0.0, 1.0], EquilibriumLabel::E3),
    ];
    if let Some(e4) = p.coexistence() {
        equilibria.push(Equilibrium::new(e4.to_vec(), EquilibriumLabel::E4));
    }
    Ok(Lv2System {
        params: p,
        spec,
        region,
        equilibria,
    })
}

/// True iff `u >= 0` and `|u_i^{l_i} f_i(u)| <= tol` for every species.
pub fn is_equilibrium(spec: &SystemSpec, u: &[f64], tol: f64) -> Result<bool> {
    check_len("u", spec.n(), u.len())?;
    if u.iter().any(|x| !(*x >= 0.0)) {
        return Ok(false);
    }
    let mut g = vec![0.0; spec.n()];
    spec.source(u, &mut g);
    Ok(g.iter().all(|x| x.abs() <= tol))
}
