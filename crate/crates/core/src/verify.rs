//! Pointwise checks of the a priori bounds along a computed profile.
//!
//! Bounds are evaluated on grid nodes only. Margins are signed: a negative
//! margin is a violated bound and is reported, never clamped.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{self, BoundParams};
use crate::error::check_len;
use crate::math;
use crate::model::{HypothesisRegion, SystemSpec};
use crate::solver::{self, WaveProfile};
use crate::{Error, Result};

/// Default tolerance for [`classify_profile`].
pub const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    LowerProduct,
    UpperSum,
    UpperProduct,
    LinearLv,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::LowerProduct => "lower_product",
            BoundKind::UpperSum => "upper_sum",
            BoundKind::UpperProduct => "upper_product",
            BoundKind::LinearLv => "linear_lv",
        }
    }

    fn is_lower(self) -> bool {
        matches!(self, BoundKind::LowerProduct)
    }
}

/// Both sides of a two-sided check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TwoSided {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub argmin_x: f64,
    pub argmax_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCheckReport {
    pub bound_kind: BoundKind,
    pub bound_value: f64,
    /// Minimum of the bounded quantity for lower bounds, maximum for upper.
    pub extremal_value: f64,
    /// `extremal - bound` for lower kinds, `bound - extremal` for upper.
    pub margin: f64,
    /// Margin in log scale, `ln(extremal) - ln(bound)`, computed without
    /// exponentiating. Only for the product lower bound, whose values can
    /// leave the range of `f64`.
    pub log_margin: Option<f64>,
    /// Grid abscissa of the extremum; ties resolve to the smallest index.
    pub location: f64,
    pub params: BoundParams,
    /// Present for the two-sided linear check.
    pub two_sided: Option<TwoSided>,
}

impl BoundCheckReport {
    /// Whether the bound holds within `tol`. Falls back to the log-scale
    /// margin when the linear one is not representable.
    pub fn satisfied(&self, tol: f64) -> bool {
        if self.margin.is_finite() {
            self.margin >= -tol
        } else {
            matches!(self.log_margin, Some(m) if m >= -tol)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolutionClass {
    pub is_upper_solution: bool,
    pub is_lower_solution: bool,
    pub tolerance: f64,
    /// Largest operator value per species over interior nodes.
    pub max_operator: Vec<f64>,
    /// Smallest operator value per species over interior nodes.
    pub min_operator: Vec<f64>,
}

/// Index of the extremum, first index among ties.
fn arg_extremum(values: &[f64], minimize: bool) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        let better = if minimize {
            v < values[best]
        } else {
            v > values[best]
        };
        if better {
            best = j;
        }
    }
    best
}

fn check_profile(spec: &SystemSpec, profile: &WaveProfile) -> Result<()> {
    check_len("profile species", spec.n(), profile.species())?;
    for s in &profile.values {
        check_len("profile values", profile.nodes(), s.len())?;
    }
    Ok(())
}

fn report(kind: BoundKind, bound: f64, quantity: &[f64], grid: &[f64], params: BoundParams) -> BoundCheckReport {
    let at = arg_extremum(quantity, kind.is_lower());
    let extremal = quantity[at];
    let margin = if kind.is_lower() {
        extremal - bound
    } else {
        bound - extremal
    };
    BoundCheckReport {
        bound_kind: kind,
        bound_value: bound,
        extremal_value: extremal,
        margin,
        log_margin: None,
        location: grid[at],
        params,
        two_sided: None,
    }
}

/// Checks `prod_i (u_i + k_i)^(d_i alpha_i) >= exp(lambda1)` at every node.
pub fn check_lower_bound(
    profile: &WaveProfile,
    spec: &SystemSpec,
    region: &HypothesisRegion,
    bp: &BoundParams,
) -> Result<BoundCheckReport> {
    check_profile(spec, profile)?;
    let ulow = region.lower()?;
    let levels = bounds::lower_levels(spec.d(), bp, ulow)?;
    let d = spec.d();
    // q = sum alpha_i d_i ln(u_i + k_i) is the log of the product
    let q: Vec<f64> = (0..profile.nodes())
        .map(|j| {
            (0..spec.n())
                .map(|i| bp.alpha[i] * d[i] * math::ln(profile.values[i][j] + bp.k[i]))
                .sum()
        })
        .collect();
    let at = arg_extremum(&q, true);
    let product: Vec<f64> = q.iter().map(|&x| math::exp(x)).collect();
    let mut r = report(BoundKind::LowerProduct, math::exp(levels.lambda1), &product, &profile.grid, bp.clone());
    // keep the location consistent with the log-scale minimum
    r.location = profile.grid[at];
    r.extremal_value = product[at];
    r.margin = r.extremal_value - r.bound_value;
    r.log_margin = Some(q[at] - levels.lambda1);
    Ok(r)
}

/// Checks the weighted power sum and the product bound; returns
/// `(sum report, product report)`.
pub fn check_upper_bounds(
    profile: &WaveProfile,
    spec: &SystemSpec,
    region: &HypothesisRegion,
    alpha: &[f64],
    m: &[f64],
) -> Result<(BoundCheckReport, BoundCheckReport)> {
    check_profile(spec, profile)?;
    let uhigh = region.upper()?;
    let d = spec.d();
    let n = spec.n();
    let params = BoundParams::upper(alpha.to_vec(), m.to_vec())?;
    let sum_bound = bounds::upper_bound_sum(d, alpha, m, uhigh)?;
    let prod_bound = bounds::upper_bound_product(d, alpha, m, uhigh)?;
    let nodes = profile.nodes();
    let mut sums = vec![0.0; nodes];
    let mut prods = vec![0.0; nodes];
    for j in 0..nodes {
        let mut s = 0.0;
        let mut p = 1.0;
        for i in 0..n {
            let u = profile.values[i][j];
            s += alpha[i] * math::pow_exp(u, m[i]);
            p *= math::powf(u, m[i] / n as f64);
        }
        sums[j] = s;
        prods[j] = p;
    }
    Ok((
        report(BoundKind::UpperSum, sum_bound, &sums, &profile.grid, params.clone()),
        report(BoundKind::UpperProduct, prod_bound, &prods, &profile.grid, params),
    ))
}

/// Two-sided check of `min(k2/a2, k1/a1) <= k2 u + k1 v <= max(k1, k2)`.
pub fn check_linear_lv(profile: &WaveProfile, a1: f64, a2: f64, k1: f64, k2: f64) -> Result<BoundCheckReport> {
    if profile.species() != 2 {
        return Err(Error::DimensionMismatch {
            what: "profile species",
            expected: 2,
            got: profile.species(),
        });
    }
    let (lo, hi) = bounds::linear_lv_bounds(k1, k2, a1, a2)?;
    let form: Vec<f64> = (0..profile.nodes())
        .map(|j| k2 * profile.values[0][j] + k1 * profile.values[1][j])
        .collect();
    let jmin = arg_extremum(&form, true);
    let jmax = arg_extremum(&form, false);
    let sides = TwoSided {
        lower_bound: lo,
        upper_bound: hi,
        min_value: form[jmin],
        max_value: form[jmax],
        lower_margin: form[jmin] - lo,
        upper_margin: hi - form[jmax],
        argmin_x: profile.grid[jmin],
        argmax_x: profile.grid[jmax],
    };
    // report the binding side; the lower side wins ties
    let lower_binds = sides.lower_margin <= sides.upper_margin;
    Ok(BoundCheckReport {
        bound_kind: BoundKind::LinearLv,
        bound_value: if lower_binds { lo } else { hi },
        extremal_value: if lower_binds { sides.min_value } else { sides.max_value },
        margin: f64::min(sides.lower_margin, sides.upper_margin),
        log_margin: None,
        location: if lower_binds { sides.argmin_x } else { sides.argmax_x },
        params: BoundParams::lower(vec![k1, k2], vec![1.0, 1.0])?,
        two_sided: Some(sides),
    })
}

/// Classifies a profile by the sign of the discrete operator at interior
/// nodes: upper solution iff every value `<= tol`, lower iff every value
/// `>= -tol`.
pub fn classify_profile(profile: &WaveProfile, spec: &SystemSpec, tol: f64) -> Result<SolutionClass> {
    let r = solver::residual(spec, profile)?;
    let n = spec.n();
    let mut max_operator = vec![f64::NEG_INFINITY; n];
    let mut min_operator = vec![f64::INFINITY; n];
    for node in r.chunks(n) {
        for i in 0..n {
            max_operator[i] = max_operator[i].max(node[i]);
            min_operator[i] = min_operator[i].min(node[i]);
        }
    }
    Ok(SolutionClass {
        is_upper_solution: max_operator.iter().all(|v| *v <= tol),
        is_lower_solution: min_operator.iter().all(|v| *v >= -tol),
        tolerance: tol,
        max_operator,
        min_operator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{lv2_system, Equilibrium, EquilibriumLabel, Lv2Params};
    use crate::solver::SolveConfig;
    use approx::assert_abs_diff_eq;

    fn constant(state: &[f64], label: EquilibriumLabel) -> WaveProfile {
        let e = Equilibrium::new(state.to_vec(), label);
        WaveProfile::constant(&e, 0.0, &SolveConfig::with_grid(2.0, 0.5)).unwrap()
    }

    fn ones() -> BoundParams {
        BoundParams::lower(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn lower_bound_at_e4() {
        let s = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
        let p = constant(&[1.0 / 3.0, 1.0 / 3.0], EquilibriumLabel::E4);
        let r = check_lower_bound(&p, &s.spec, &s.region, &ones()).unwrap();
        assert_eq!(r.bound_kind, BoundKind::LowerProduct);
        assert_abs_diff_eq!(r.bound_value, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.extremal_value, 16.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.margin, 16.0 / 9.0 - 1.5, epsilon = 1e-14);
        assert_eq!(r.location, -2.0);
    }

    #[test]
    fn lower_bound_signed_margin_at_origin() {
        let s = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
        let p = constant(&[0.0, 0.0], EquilibriumLabel::E1);
        let r = check_lower_bound(&p, &s.spec, &s.region, &ones()).unwrap();
        assert_abs_diff_eq!(r.extremal_value, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.margin, -0.5, epsilon = 1e-14);
        assert!(!r.satisfied(1e-8));
    }

    #[test]
    fn upper_bounds_at_e4() {
        let s = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
        let p = constant(&[1.0 / 3.0, 1.0 / 3.0], EquilibriumLabel::E4);
        let (sum, prod) = check_upper_bounds(&p, &s.spec, &s.region, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(sum.extremal_value, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sum.margin, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prod.extremal_value, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prod.margin, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn near_degenerate_product_approaches_quarter() {
        let a = 1.001;
        let s = lv2_system(Lv2Params::new(a, a, 1.0)).unwrap();
        let e4 = s.equilibrium(EquilibriumLabel::E4).unwrap();
        let p = constant(&e4.state, EquilibriumLabel::E4);
        let (_, prod) = check_upper_bounds(&p, &s.spec, &s.region, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let uv = prod.extremal_value * prod.extremal_value;
        assert_abs_diff_eq!(uv, (1.0 / (1.0 + a)).powi(2), epsilon = 1e-12);
        assert!(prod.margin > 0.0 && prod.margin < 1e-3);
    }

    #[test]
    fn linear_checks() {
        let p = constant(&[1.0, 0.0], EquilibriumLabel::E2);
        let r = check_linear_lv(&p, 2.0, 2.0, 1.0, 1.0).unwrap();
        let sides = r.two_sided.unwrap();
        assert_eq!(sides.upper_margin, 0.0);
        assert_eq!(r.margin, 0.0);

        let p = constant(&[1.0 / 3.0, 1.0 / 3.0], EquilibriumLabel::E4);
        let r = check_linear_lv(&p, 2.0, 2.0, 1.0, 1.0).unwrap();
        let sides = r.two_sided.unwrap();
        assert_abs_diff_eq!(sides.lower_margin, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sides.upper_margin, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.margin, 1.0 / 6.0, epsilon = 1e-15);

        let p3 = WaveProfile {
            values: vec![vec![0.0; 9]; 3],
            ..p
        };
        assert!(check_linear_lv(&p3, 2.0, 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn classification() {
        let s = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
        let p = constant(&[1.0 / 3.0, 1.0 / 3.0], EquilibriumLabel::E4);
        let c = classify_profile(&p, &s.spec, 1e-12).unwrap();
        assert!(c.is_upper_solution && c.is_lower_solution);

        let p = constant(&[0.5, 0.5], EquilibriumLabel::Custom);
        let c = classify_profile(&p, &s.spec, 1e-3).unwrap();
        assert!(c.is_upper_solution);
        assert!(!c.is_lower_solution);
        assert_eq!(c.min_operator[0], -0.25);
    }

    #[test]
    fn missing_thresholds_are_errors() {
        let s = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
        let p = constant(&[0.0, 0.0], EquilibriumLabel::E1);
        let empty = HypothesisRegion::default();
        assert!(check_lower_bound(&p, &s.spec, &empty, &ones()).is_err());
        assert!(check_upper_bounds(&p, &s.spec, &empty, &[1.0, 1.0], &[1.0, 1.0]).is_err());
    }
}
