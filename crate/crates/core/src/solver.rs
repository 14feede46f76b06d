//! Traveling-wave profiles on a truncated domain.
//!
//! The wave equation `d_i u_i'' + theta u_i' + u_i^{l_i} f_i(u) = 0` is
//! discretized with second-order central differences on the uniform grid
//! `x_j = -L + j h`, `j = 0..=N`, with the end values pinned to the boundary
//! equilibria. Interior unknowns are ordered node-major (`(j - 1) n + i`), so
//! the Jacobian is banded with `n` diagonals on each side.
//!
//! With free speed, `theta` becomes an extra unknown. The phase condition
//! `u_1(0) = (left_1 + right_1) / 2` closes the system, and the bordered
//! Newton system is solved by block elimination around the banded factor.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::banded::BandMatrix;
use crate::error::check_len;
use crate::math;
use crate::model::{self, Equilibrium, EquilibriumLabel, Lv2Params, SystemSpec};
use crate::Error;

/// Tolerance for accepting the boundary states as equilibria.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Half-length `L` of the domain `[-L, L]`.
    pub half_length: f64,
    /// Grid spacing `h`; `2L / h` must be an even integer.
    pub spacing: f64,
    /// Max-norm residual tolerance.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Backtracking factor applied to the step until the residual drops.
    pub damping: f64,
    /// Smallest step fraction before the line search gives up.
    pub min_step: f64,
    /// Largest allowed deviation from the boundary state at distance
    /// `boundary_offset` from each end; `None` disables the check.
    pub boundary_tol: Option<f64>,
    pub boundary_offset: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            half_length: 30.0,
            spacing: 0.05,
            newton_tol: 1e-10,
            max_iter: 50,
            damping: 0.5,
            min_step: 1.0 / (1u32 << 20) as f64,
            boundary_tol: Some(1e-3),
            boundary_offset: 1.0,
        }
    }
}

impl SolveConfig {
    pub fn with_grid(half_length: f64, spacing: f64) -> Self {
        SolveConfig {
            half_length,
            spacing,
            ..Default::default()
        }
    }

    /// Number of grid intervals `N = 2L / h`.
    pub fn intervals(&self) -> Result<usize, SolveError> {
        let bad = |field: &'static str, value: f64| SolveError::InvalidConfig { field, value };
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(bad("half_length", self.half_length));
        }
        if !(self.spacing > 0.0 && self.spacing <= self.half_length) {
            return Err(bad("spacing", self.spacing));
        }
        if !(self.newton_tol > 0.0) {
            return Err(bad("newton_tol", self.newton_tol));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(bad("damping", self.damping));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(bad("min_step", self.min_step));
        }
        let ratio = 2.0 * self.half_length / self.spacing;
        let n = libm::round(ratio);
        if (ratio - n).abs() > 1e-9 * ratio || n < 2.0 || !(n as usize).is_multiple_of(2) {
            return Err(bad("spacing", self.spacing));
        }
        Ok(n as usize)
    }

    /// Uniform abscissae `-L + j h`.
    pub fn grid(&self) -> Result<Vec<f64>, SolveError> {
        let n = self.intervals()?;
        let h = 2.0 * self.half_length / n as f64;
        Ok((0..=n).map(|j| -self.half_length + j as f64 * h).collect())
    }
}

/// A discretized wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub grid: Vec<f64>,
    /// `values[i][j] = u_i(x_j)`.
    pub values: Vec<Vec<f64>>,
    pub theta: f64,
    pub left: Equilibrium,
    pub right: Equilibrium,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl WaveProfile {
    pub fn species(&self) -> usize {
        self.values.len()
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn spacing(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.grid[self.grid.len() - 1] - self.grid[0])
    }

    /// State vector at node `j`.
    pub fn state(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|s| s[j]).collect()
    }

    /// Constant profile at `state` on the grid of `cfg`.
    pub fn constant(state: &Equilibrium, theta: f64, cfg: &SolveConfig) -> Result<Self, SolveError> {
        let grid = cfg.grid()?;
        let values = state.state.iter().map(|&s| vec![s; grid.len()]).collect();
        Ok(WaveProfile {
            grid,
            values,
            theta,
            left: state.clone(),
            right: state.clone(),
            residual_norm: f64::NAN,
            iterations: 0,
        })
    }

    /// `left + (right - left) (1 + tanh x) / 2` componentwise.
    pub fn tanh_guess(left: &Equilibrium, right: &Equilibrium, theta: f64, cfg: &SolveConfig) -> Result<Self, SolveError> {
        let grid = cfg.grid()?;
        check_len("right", left.state.len(), right.state.len())?;
        let last = grid.len() - 1;
        let values = left
            .state
            .iter()
            .zip(&right.state)
            .map(|(&a, &b)| {
                grid.iter()
                    .enumerate()
                    .map(|(j, &x)| match j {
                        0 => a,
                        j if j == last => b,
                        _ => a + (b - a) * 0.5 * (1.0 + math::tanh(x)),
                    })
                    .collect()
            })
            .collect();
        Ok(WaveProfile {
            grid,
            values,
            theta,
            left: left.clone(),
            right: right.clone(),
            residual_norm: f64::NAN,
            iterations: 0,
        })
    }

    /// Largest deviation from the boundary states at distance `offset` in
    /// from each end.
    pub fn boundary_defect(&self, offset: f64) -> f64 {
        let h = self.spacing();
        let k = libm::round(offset / h) as usize;
        let k = k.min(self.nodes() / 2);
        let lo = self.state(k);
        let hi = self.state(self.nodes() - 1 - k);
        let dl = lo.iter().zip(&self.left.state).map(|(a, b)| (a - b).abs());
        let dr = hi.iter().zip(&self.right.state).map(|(a, b)| (a - b).abs());
        dl.chain(dr).fold(0.0, f64::max)
    }

    /// Cubic Lagrange interpolation of species `i` at `x` (clamped to the
    /// grid).
    pub fn interpolate(&self, i: usize, x: f64) -> f64 {
        let n = self.nodes();
        let s = &self.values[i];
        if n < 4 {
            let h = self.spacing();
            let t = ((x - self.grid[0]) / h).clamp(0.0, (n - 1) as f64);
            let j = (libm::floor(t) as usize).min(n - 2);
            let w = t - j as f64;
            return s[j] * (1.0 - w) + s[j + 1] * w;
        }
        let h = self.spacing();
        let t = ((x - self.grid[0]) / h).clamp(0.0, (n - 1) as f64);
        let j = (libm::floor(t) as usize).clamp(1, n - 3);
        let w = t - j as f64;
        // nodes j-1, j, j+1, j+2 at offsets -1, 0, 1, 2
        let c0 = -w * (w - 1.0) * (w - 2.0) / 6.0;
        let c1 = (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0;
        let c2 = -(w + 1.0) * w * (w - 2.0) / 2.0;
        let c3 = (w + 1.0) * w * (w - 1.0) / 6.0;
        c0 * s[j - 1] + c1 * s[j] + c2 * s[j + 1] + c3 * s[j + 2]
    }

    /// First abscissa where species `a` and `b` cross, located on the cubic
    /// interpolant. `None` when their difference keeps one sign.
    pub fn crossing(&self, a: usize, b: usize) -> Option<f64> {
        let w = |j: usize| self.values[a][j] - self.values[b][j];
        let j = (0..self.nodes() - 1).find(|&j| w(j) == 0.0 || (w(j) > 0.0) != (w(j + 1) > 0.0))?;
        if w(j) == 0.0 {
            return Some(self.grid[j]);
        }
        let f = |x: f64| self.interpolate(a, x) - self.interpolate(b, x);
        let (mut lo, mut hi) = (self.grid[j], self.grid[j + 1]);
        let lo_positive = f(lo) > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (f(mid) > 0.0) == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// `max_j |u_1(x_j) - u_2(2c - x_j)|` over nodes whose mirror image lies
    /// on the grid, for a two-species profile. With `c = 0` and a grid
    /// symmetric about the origin this is the nodewise defect of the swap
    /// symmetry `(u, v)(x) -> (v, u)(-x)`.
    pub fn swap_symmetry_defect(&self, center: f64) -> f64 {
        let (x0, x1) = (self.grid[0], self.grid[self.nodes() - 1]);
        let h = self.spacing();
        let mut worst: f64 = 0.0;
        for j in 0..self.nodes() {
            let y = 2.0 * center - self.grid[j];
            if y < x0 - 1e-9 * h || y > x1 + 1e-9 * h {
                continue;
            }
            // exact mirror node when the reflection lands on the grid
            let t = (y - x0) / h;
            let k = libm::round(t);
            let v = if (t - k).abs() < 1e-9 {
                self.values[1][k as usize]
            } else {
                self.interpolate(1, y)
            };
            worst = worst.max((self.values[0][j] - v).abs());
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Input(#[from] Error),
    #[error("invalid solver setting `{field}` = {value}")]
    InvalidConfig { field: &'static str, value: f64 },
    #[error("{side} boundary state {label} is not an equilibrium")]
    NotEquilibrium { side: &'static str, label: EquilibriumLabel },
    #[error("initial profile does not match the solver grid")]
    GridMismatch,
    #[error("Newton did not converge after {iterations} iterations (residual {residual_norm:e}{})", if *.stalled { ", line search stalled" } else { "" })]
    NonConvergence {
        iterations: usize,
        residual_norm: f64,
        stalled: bool,
        last: Box<WaveProfile>,
    },
    #[error("singular {} Jacobian at iteration {iteration}", if *.augmented { "augmented" } else { "" })]
    SingularJacobian { iteration: usize, augmented: bool },
    #[error("profile deviates by {defect:e} from the boundary states near the ends of the domain")]
    BoundaryLayer { defect: f64, profile: Box<WaveProfile> },
    #[error("degenerate competition system: a1 * a2 = 1")]
    DegenerateSystem,
}

/// Discrete operator `d_i D2 u_i + theta D1 u_i + u_i^{l_i} f_i` at the
/// interior nodes, node-major, length `n (N - 1)`.
pub fn residual(spec: &SystemSpec, profile: &WaveProfile) -> Result<Vec<f64>, Error> {
    let n = spec.n();
    check_len("profile species", n, profile.species())?;
    let nodes = profile.nodes();
    if nodes < 3 {
        return Err(Error::invalid("grid", "at least 3 nodes", nodes as f64));
    }
    for s in &profile.values {
        check_len("profile values", nodes, s.len())?;
    }
    let h = profile.spacing();
    let mut out = vec![0.0; n * (nodes - 2)];
    let mut state = vec![0.0; n];
    let mut g = vec![0.0; n];
    operator(spec, &profile.values, h, profile.theta, &mut state, &mut g, &mut out);
    Ok(out)
}

fn operator(
    spec: &SystemSpec,
    values: &[Vec<f64>],
    h: f64,
    theta: f64,
    state: &mut [f64],
    g: &mut [f64],
    out: &mut [f64],
) {
    let n = spec.n();
    let nodes = values[0].len();
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 0.5 / h;
    for j in 1..nodes - 1 {
        for (i, s) in values.iter().enumerate() {
            state[i] = s[j];
        }
        spec.source(state, g);
        for (i, s) in values.iter().enumerate() {
            let diff = (s[j + 1] - 2.0 * s[j] + s[j - 1]) * inv_h2;
            let adv = (s[j + 1] - s[j - 1]) * inv_2h;
            out[(j - 1) * n + i] = spec.d()[i] * diff + theta * adv + g[i];
        }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| {
        let a = x.abs();
        // NaN poisons the norm so the line search rejects the step
        if a.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            f64::max(m, a)
        }
    })
}

struct Newton<'a> {
    spec: &'a SystemSpec,
    cfg: &'a SolveConfig,
    n: usize,
    nodes: usize,
    h: f64,
    /// Interior index of the node at `x = 0`.
    center: usize,
    phase_target: f64,
    free: bool,
}

impl Newton<'_> {
    fn unknowns(&self) -> usize {
        self.n * (self.nodes - 2)
    }

    /// Residual including the phase condition as the last entry when free.
    fn full_residual(&self, values: &[Vec<f64>], theta: f64, out: &mut Vec<f64>) {
        let m = self.unknowns();
        out.resize(m + self.free as usize, 0.0);
        let mut state = vec![0.0; self.n];
        let mut g = vec![0.0; self.n];
        operator(self.spec, values, self.h, theta, &mut state, &mut g, &mut out[..m]);
        if self.free {
            out[m] = values[0][self.center] - self.phase_target;
        }
    }

    fn jacobian(&self, values: &[Vec<f64>], theta: f64) -> BandMatrix {
        let n = self.n;
        let m = self.unknowns();
        let mut jac = BandMatrix::zeros(m, n, n);
        let inv_h2 = 1.0 / (self.h * self.h);
        let inv_2h = 0.5 / self.h;
        let mut state = vec![0.0; n];
        let mut f = vec![0.0; n];
        let mut dg = vec![0.0; n * n];
        for j in 1..self.nodes - 1 {
            for (i, s) in values.iter().enumerate() {
                state[i] = s[j];
            }
            self.spec.source_jacobian(&state, &mut f, &mut dg);
            let row0 = (j - 1) * n;
            for i in 0..n {
                let row = row0 + i;
                let di = self.spec.d()[i];
                if j > 1 {
                    jac.add(row, row - n, di * inv_h2 - theta * inv_2h);
                }
                if j < self.nodes - 2 {
                    jac.add(row, row + n, di * inv_h2 + theta * inv_2h);
                }
                jac.add(row, row, -2.0 * di * inv_h2);
                for k in 0..n {
                    jac.add(row, row0 + k, dg[i * n + k]);
                }
            }
        }
        jac
    }

    /// `d(residual)/d(theta)`: the central first difference.
    fn theta_column(&self, values: &[Vec<f64>]) -> Vec<f64> {
        let n = self.n;
        let inv_2h = 0.5 / self.h;
        let mut col = vec![0.0; self.unknowns()];
        for j in 1..self.nodes - 1 {
            for (i, s) in values.iter().enumerate() {
                col[(j - 1) * n + i] = (s[j + 1] - s[j - 1]) * inv_2h;
            }
        }
        col
    }

    /// Newton direction for the current iterate; `rhs` holds the residual.
    fn direction(&self, values: &[Vec<f64>], theta: f64, rhs: &[f64], iteration: usize) -> Result<(Vec<f64>, f64), SolveError> {
        let m = self.unknowns();
        let lu = self
            .jacobian(values, theta)
            .factor()
            .map_err(|_| SolveError::SingularJacobian {
                iteration,
                augmented: false,
            })?;
        let mut y: Vec<f64> = rhs[..m].iter().map(|r| -r).collect();
        lu.solve_in_place(&mut y);
        if !self.free {
            return Ok((y, 0.0));
        }
        // J du + b dtheta = -F, e_c . du = -g
        let mut z = self.theta_column(values);
        lu.solve_in_place(&mut z);
        let c = (self.center - 1) * self.n;
        let z_scale = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let denom = z[c];
        if !(denom.abs() > 1e-12 * (1.0 + z_scale)) {
            return Err(SolveError::SingularJacobian {
                iteration,
                augmented: true,
            });
        }
        let dtheta = (y[c] + rhs[m]) / denom;
        for (yi, zi) in y.iter_mut().zip(&z) {
            *yi -= zi * dtheta;
        }
        Ok((y, dtheta))
    }

    fn scatter(&self, values: &mut [Vec<f64>], base: &[Vec<f64>], step: &[f64], s: f64) {
        let n = self.n;
        for j in 1..self.nodes - 1 {
            for i in 0..n {
                let v = base[i][j] + s * step[(j - 1) * n + i];
                values[i][j] = if v < 0.0 { 0.0 } else { v };
            }
        }
    }

    fn run(&self, mut values: Vec<Vec<f64>>, mut theta: f64, left: &Equilibrium, right: &Equilibrium, grid: Vec<f64>) -> Result<WaveProfile, SolveError> {
        let mut f = Vec::new();
        let mut trial_f = Vec::new();
        let mut trial = values.clone();
        self.full_residual(&values, theta, &mut f);
        let mut norm = max_norm(&f);
        let mut iterations = 0;
        let finish = |values: Vec<Vec<f64>>, theta: f64, norm: f64, iterations: usize| WaveProfile {
            grid: grid.clone(),
            values,
            theta,
            left: left.clone(),
            right: right.clone(),
            residual_norm: norm,
            iterations,
        };

        loop {
            if norm <= self.cfg.newton_tol {
                if self.free {
                    // the speed must be locally determined at the solution
                    self.direction(&values, theta, &f, iterations)?;
                }
                let profile = finish(values, theta, norm, iterations);
                if let Some(tol) = self.cfg.boundary_tol {
                    let defect = profile.boundary_defect(self.cfg.boundary_offset);
                    if defect > tol {
                        return Err(SolveError::BoundaryLayer {
                            defect,
                            profile: Box::new(profile),
                        });
                    }
                }
                return Ok(profile);
            }
            if iterations == self.cfg.max_iter {
                return Err(SolveError::NonConvergence {
                    iterations,
                    residual_norm: norm,
                    stalled: false,
                    last: Box::new(finish(values, theta, norm, iterations)),
                });
            }
            let (step, dtheta) = self.direction(&values, theta, &f, iterations)?;
            iterations += 1;

            let mut s = 1.0;
            loop {
                self.scatter(&mut trial, &values, &step, s);
                let trial_theta = theta + s * dtheta;
                self.full_residual(&trial, trial_theta, &mut trial_f);
                let trial_norm = max_norm(&trial_f);
                if trial_norm < norm {
                    core::mem::swap(&mut values, &mut trial);
                    core::mem::swap(&mut f, &mut trial_f);
                    theta = trial_theta;
                    norm = trial_norm;
                    break;
                }
                s *= self.cfg.damping;
                if s < self.cfg.min_step {
                    return Err(SolveError::NonConvergence {
                        iterations,
                        residual_norm: norm,
                        stalled: true,
                        last: Box::new(finish(values, theta, norm, iterations)),
                    });
                }
            }
        }
    }
}

fn prepare<'a>(
    spec: &'a SystemSpec,
    left: &Equilibrium,
    right: &Equilibrium,
    cfg: &'a SolveConfig,
    initial: Option<&WaveProfile>,
    free: bool,
) -> Result<(Newton<'a>, Vec<Vec<f64>>, f64, Vec<f64>), SolveError> {
    let n = spec.n();
    check_len("left", n, left.state.len())?;
    check_len("right", n, right.state.len())?;
    if !model::is_equilibrium(spec, &left.state, EQUILIBRIUM_TOL)? {
        return Err(SolveError::NotEquilibrium {
            side: "left",
            label: left.label,
        });
    }
    if !model::is_equilibrium(spec, &right.state, EQUILIBRIUM_TOL)? {
        return Err(SolveError::NotEquilibrium {
            side: "right",
            label: right.label,
        });
    }
    let intervals = cfg.intervals()?;
    let grid = cfg.grid()?;
    let start = match initial {
        Some(p) => {
            if p.species() != n || p.nodes() != grid.len() || (p.half_length() - cfg.half_length).abs() > 1e-9 * cfg.half_length {
                return Err(SolveError::GridMismatch);
            }
            p.clone()
        }
        None => WaveProfile::tanh_guess(left, right, spec.theta(), cfg)?,
    };
    let mut values = start.values;
    // Dirichlet data
    for i in 0..n {
        values[i][0] = left.state[i];
        values[i][intervals] = right.state[i];
    }
    let theta = if free { start.theta } else { spec.theta() };
    let newton = Newton {
        spec,
        cfg,
        n,
        nodes: intervals + 1,
        h: 2.0 * cfg.half_length / intervals as f64,
        center: intervals / 2,
        phase_target: 0.5 * (left.state[0] + right.state[0]),
        free,
    };
    Ok((newton, values, theta, grid))
}

/// Damped Newton at the speed stored in `spec`.
///
/// The default initial guess is the tanh interpolation between the boundary
/// states. Negative trial values are clamped to zero during the line search,
/// so accepted iterates stay nonnegative.
pub fn solve_fixed_speed(
    spec: &SystemSpec,
    left: &Equilibrium,
    right: &Equilibrium,
    cfg: &SolveConfig,
    initial: Option<&WaveProfile>,
) -> Result<WaveProfile, SolveError> {
    let (newton, values, theta, grid) = prepare(spec, left, right, cfg, initial, false)?;
    newton.run(values, theta, left, right, grid)
}

/// Damped Newton with `theta` as an unknown, pinned by
/// `u_1(0) = (left_1 + right_1) / 2`. The starting speed is taken from the
/// initial profile, or from `spec` for the default guess.
pub fn solve_free_speed(
    spec: &SystemSpec,
    left: &Equilibrium,
    right: &Equilibrium,
    cfg: &SolveConfig,
    initial: Option<&WaveProfile>,
) -> Result<WaveProfile, SolveError> {
    let (newton, values, theta, grid) = prepare(spec, left, right, cfg, initial, true)?;
    newton.run(values, theta, left, right, grid)
}

/// Parameter varied along a continuation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ContinuationParam {
    A1,
    A2,
    /// `a1 = a2 = a`.
    A,
    Kappa,
}

impl ContinuationParam {
    pub fn apply(self, base: Lv2Params, value: f64) -> Lv2Params {
        let mut p = base;
        match self {
            ContinuationParam::A1 => p.a1 = value,
            ContinuationParam::A2 => p.a2 = value,
            ContinuationParam::A => {
                p.a1 = value;
                p.a2 = value;
            }
            ContinuationParam::Kappa => p.kappa = value,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Speed {
    Fixed,
    Free,
}

/// A continuation step that failed, with everything solved before it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("continuation aborted at step {step} (value {value}): {source}")]
pub struct ContinuationError {
    pub step: usize,
    pub value: f64,
    pub completed: Vec<WaveProfile>,
    pub source: SolveError,
}

/// Solves the two-species competition wave `left -> right` for each value
/// in `schedule`, warm-starting every solve from the previous profile.
pub fn continuation(
    base: Lv2Params,
    param: ContinuationParam,
    schedule: &[f64],
    left: EquilibriumLabel,
    right: EquilibriumLabel,
    cfg: &SolveConfig,
    speed: Speed,
) -> Result<Vec<WaveProfile>, ContinuationError> {
    let abort = |step: usize, value: f64, completed: Vec<WaveProfile>, source: SolveError| ContinuationError {
        step,
        value,
        completed,
        source,
    };
    if let Some(pos) = monotone_break(schedule) {
        return Err(abort(pos, schedule[pos], Vec::new(), Error::NonMonotoneSchedule(pos).into()));
    }
    let mut profiles: Vec<WaveProfile> = Vec::with_capacity(schedule.len());
    for (step, &value) in schedule.iter().enumerate() {
        let params = param.apply(base, value);
        if params.a1 * params.a2 == 1.0 {
            return Err(abort(step, value, profiles, SolveError::DegenerateSystem));
        }
        let result = model::lv2_system(params).map_err(SolveError::from).and_then(|sys| {
            let find = |label| {
                sys.equilibrium(label).cloned().ok_or(SolveError::NotEquilibrium {
                    side: if label == left { "left" } else { "right" },
                    label,
                })
            };
            let (l, r) = (find(left)?, find(right)?);
            let spec = match (speed, profiles.last()) {
                (Speed::Fixed, _) => sys.spec.clone(),
                (Speed::Free, Some(prev)) => sys.spec.with_theta(prev.theta),
                (Speed::Free, None) => sys.spec.clone(),
            };
            let warm = profiles.last().map(|prev| WaveProfile {
                left: l.clone(),
                right: r.clone(),
                ..prev.clone()
            });
            match speed {
                Speed::Fixed => solve_fixed_speed(&spec, &l, &r, cfg, warm.as_ref()),
                Speed::Free => solve_free_speed(&spec, &l, &r, cfg, warm.as_ref()),
            }
        });
        match result {
            Ok(p) => profiles.push(p),
            Err(e) => return Err(abort(step, value, profiles, e)),
        }
    }
    Ok(profiles)
}

fn monotone_break(schedule: &[f64]) -> Option<usize> {
    if schedule.len() < 2 {
        return None;
    }
    let increasing = schedule[1] > schedule[0];
    schedule.windows(2).position(|w| if increasing { !(w[1] > w[0]) } else { !(w[1] < w[0]) }).map(|p| p + 1)
}
