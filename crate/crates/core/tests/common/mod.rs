#![allow(dead_code)]

use nbarrier_core::model::lv2_system;
use nbarrier_core::solver::{
    continuation, solve_fixed_speed, solve_free_speed, ContinuationParam, SolveConfig, SolveError, Speed,
};
use nbarrier_core::{EquilibriumLabel, Lv2Params, Lv2System, WaveProfile};

pub fn lv(a1: f64, a2: f64) -> Lv2System {
    lv2_system(Lv2Params::new(a1, a2, 1.0)).unwrap()
}

/// `e2 -> e3` wave of the competition system at unit `kappa` and diffusion.
pub fn bistable_wave(a1: f64, a2: f64, cfg: &SolveConfig, free: bool) -> Result<WaveProfile, SolveError> {
    let sys = lv(a1, a2);
    let e2 = sys.equilibrium(EquilibriumLabel::E2).unwrap();
    let e3 = sys.equilibrium(EquilibriumLabel::E3).unwrap();
    if free {
        solve_free_speed(&sys.spec, e2, e3, cfg, None)
    } else {
        solve_fixed_speed(&sys.spec, e2, e3, cfg, None)
    }
}

/// The symmetric bistable wave `a1 = a2 = 2` at the default grid.
pub fn symmetric_wave() -> WaveProfile {
    bistable_wave(2.0, 2.0, &SolveConfig::default(), false).unwrap()
}

/// Speed of the `e2 -> e3` wave from the free-speed solve.
pub fn free_speed(a1: f64, a2: f64, cfg: &SolveConfig) -> f64 {
    bistable_wave(a1, a2, cfg, true).unwrap().theta
}

/// Largest difference between the discrete residual of the smooth profile
/// `u = (1 - tanh x) / 2`, `v = (1 + tanh x) / 2` and the exact operator
/// `u'' + theta u' + u f(u)` of the `a1 = a2 = 2` system, over interior
/// nodes of `[-5, 5]` with spacing `h`.
pub fn manufactured_error(h: f64) -> f64 {
    use nbarrier_core::solver::residual;
    use nbarrier_core::Equilibrium;
    let theta = 0.3;
    let sys = lv(2.0, 2.0);
    let spec = sys.spec.with_theta(theta);
    let cfg = SolveConfig::with_grid(5.0, h);
    let grid = cfg.grid().unwrap();
    let u = |x: f64| 0.5 * (1.0 - x.tanh());
    let v = |x: f64| 0.5 * (1.0 + x.tanh());
    let profile = WaveProfile {
        values: vec![grid.iter().map(|&x| u(x)).collect(), grid.iter().map(|&x| v(x)).collect()],
        grid: grid.clone(),
        theta,
        left: Equilibrium::new(vec![u(-5.0), v(-5.0)], EquilibriumLabel::Custom),
        right: Equilibrium::new(vec![u(5.0), v(5.0)], EquilibriumLabel::Custom),
        residual_norm: f64::NAN,
        iterations: 0,
    };
    let r = residual(&spec, &profile).unwrap();
    let mut worst: f64 = 0.0;
    for (j, &x) in grid.iter().enumerate().skip(1).take(grid.len() - 2) {
        let (t, s2) = (x.tanh(), 1.0 / x.cosh().powi(2));
        let (uu, vv) = (u(x), v(x));
        let exact = [
            t * s2 - theta * 0.5 * s2 + uu * (1.0 - uu - 2.0 * vv),
            -t * s2 + theta * 0.5 * s2 + vv * (1.0 - 2.0 * uu - vv),
        ];
        for i in 0..2 {
            worst = worst.max((r[(j - 1) * 2 + i] - exact[i]).abs());
        }
    }
    worst
}

/// Converged waves paired with their systems.
pub fn corpus() -> Vec<(Lv2System, WaveProfile)> {
    let mut out = vec![(lv(2.0, 2.0), symmetric_wave())];
    out.push((lv(2.0, 4.0), bistable_wave(2.0, 4.0, &SolveConfig::default(), true).unwrap()));
    out.push((lv(3.0, 1.5), bistable_wave(3.0, 1.5, &SolveConfig::default(), true).unwrap()));
    let schedule = [1.5, 1.1, 1.01];
    let family = continuation(
        Lv2Params::new(1.5, 1.5, 1.0),
        ContinuationParam::A,
        &schedule,
        EquilibriumLabel::E2,
        EquilibriumLabel::E3,
        &SolveConfig::with_grid(100.0, 0.1),
        Speed::Free,
    )
    .unwrap();
    for (a, p) in schedule.iter().zip(family) {
        out.push((lv(*a, *a), p));
    }
    out
}
