//! Pointwise bound checks along computed waves.

mod common;

use common::{bistable_wave, corpus, lv, symmetric_wave};
use nbarrier_core::model::lv2_system;
use nbarrier_core::sampling::{log_uniform, rng, uniform};
use nbarrier_core::solver::SolveConfig;
use nbarrier_core::verify::{check_linear_lv, check_lower_bound, check_upper_bounds, classify_profile};
use nbarrier_core::{BoundParams, Lv2Params};

#[test]
fn headline_bounds_hold_along_symmetric_wave() {
    let sys = lv(2.0, 2.0);
    let p = symmetric_wave();
    let max_uv = (0..p.nodes()).map(|j| p.values[0][j] * p.values[1][j]).fold(0.0, f64::max);
    assert!(max_uv <= 0.25 + 1e-8);
    let (sum, product) = check_upper_bounds(&p, &sys.spec, &sys.region, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
    assert_eq!(sum.bound_value, 1.0);
    assert_eq!(product.bound_value, 0.5);
    assert!(sum.margin >= -1e-8 && product.margin >= -1e-8);
    let linear = check_linear_lv(&p, 2.0, 2.0, 1.0, 1.0).unwrap();
    let sides = linear.two_sided.unwrap();
    assert_eq!((sides.lower_bound, sides.upper_bound), (0.5, 1.0));
    assert!(linear.margin >= -1e-8);
    let bp = BoundParams::lower(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
    assert!(check_lower_bound(&p, &sys.spec, &sys.region, &bp).unwrap().margin >= -1e-8);
}

#[test]
fn converged_waves_are_upper_and_lower_solutions() {
    for (sys, p) in corpus() {
        let class = classify_profile(&p, &sys.spec.with_theta(p.theta), 1e-8).unwrap();
        assert!(class.is_upper_solution && class.is_lower_solution);
    }
}

#[test]
fn lower_bound_holds_over_random_weights() {
    let mut r = rng(11);
    for (sys, p) in corpus() {
        let spec = sys.spec.with_theta(p.theta);
        assert!(classify_profile(&p, &spec, 1e-8).unwrap().is_upper_solution);
        for _ in 0..100 {
            let k = vec![log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2)];
            let alpha = vec![log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2)];
            let bp = BoundParams::lower(k, alpha).unwrap();
            let report = check_lower_bound(&p, &spec, &sys.region, &bp).unwrap();
            assert!(report.satisfied(1e-6), "{report:?}");
        }
    }
}

#[test]
fn upper_bounds_hold_over_random_weights() {
    let mut r = rng(12);
    for (sys, p) in corpus() {
        let spec = sys.spec.with_theta(p.theta);
        assert!(classify_profile(&p, &spec, 1e-8).unwrap().is_lower_solution);
        for _ in 0..100 {
            let alpha = [log_uniform(&mut r, 1e-2, 1e2), log_uniform(&mut r, 1e-2, 1e2)];
            let m = [uniform(&mut r, 1.0, 3.0), uniform(&mut r, 1.0, 3.0)];
            let (sum, product) = check_upper_bounds(&p, &spec, &sys.region, &alpha, &m).unwrap();
            assert!(sum.margin >= -1e-6, "{sum:?}");
            assert!(product.margin >= -1e-6, "{product:?}");
            // arithmetic-geometric mean inequality between the two reports
            let mean = (alpha[0] * alpha[1]).sqrt();
            assert!(product.extremal_value <= sum.extremal_value / (2.0 * mean) + 1e-10);
        }
    }
}

#[test]
fn margins_are_stable_under_refinement() {
    let sys = lv2_system(Lv2Params::new(2.0, 2.0, 1.0)).unwrap();
    let bp = BoundParams::lower(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
    let margins = |h: f64| {
        let p = bistable_wave(2.0, 2.0, &SolveConfig::with_grid(30.0, h), false).unwrap();
        let lower = check_lower_bound(&p, &sys.spec, &sys.region, &bp).unwrap().margin;
        let (sum, product) = check_upper_bounds(&p, &sys.spec, &sys.region, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let linear = check_linear_lv(&p, 2.0, 2.0, 1.0, 1.0).unwrap().margin;
        [lower, sum.margin, product.margin, linear]
    };
    let (coarse, fine) = (margins(0.1), margins(0.05));
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a - b).abs() <= 1e-3, "{coarse:?} vs {fine:?}");
    }
}
