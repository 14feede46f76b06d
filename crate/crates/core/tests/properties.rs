//! Randomized invariants of the closed-form bounds, the barrier geometry,
//! the Lotka-Volterra preset and the hypothesis checks.

use nbarrier_core::bounds::{self, BoundParams};
use nbarrier_core::hypotheses::{check_h1, check_h2, DEFAULT_BOX_FACTOR};
use nbarrier_core::model::{eval_reaction, is_equilibrium, lv2_system};
use nbarrier_core::{BarrierConstruction, HypothesisRegion, Lv2Params, Method};
use proptest::collection::vec;
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// `(d, k, alpha, thresholds)` of a common length `n` in `2..=5`.
fn lower_inputs(lo: f64, hi: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=5).prop_flat_map(move |n| {
        (
            vec(log_uniform(lo, hi), n),
            vec(log_uniform(lo, hi), n),
            vec(log_uniform(lo, hi), n),
            vec(log_uniform(lo, hi), n),
        )
    })
}

/// `(d, alpha, m, thresholds)` with `m` in `[1, 3]`.
fn upper_inputs(lo: f64, hi: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=5).prop_flat_map(move |n| {
        (
            vec(log_uniform(lo, hi), n),
            vec(log_uniform(lo, hi), n),
            vec(1.0..3.0, n),
            vec(log_uniform(lo, hi), n),
        )
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn permuted(v: &[f64], perm: &[usize]) -> Vec<f64> {
    perm.iter().map(|&i| v[i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lower_levels_are_homogeneous_in_alpha(
        (d, k, alpha, ulow) in lower_inputs(0.1, 10.0),
        c in log_uniform(0.1, 10.0),
    ) {
        let bp = BoundParams::lower(k.clone(), alpha.clone()).unwrap();
        let scaled = BoundParams::lower(k, alpha.iter().map(|a| c * a).collect()).unwrap();
        let a = bounds::lower_levels(&d, &bp, &ulow).unwrap();
        let b = bounds::lower_levels(&d, &scaled, &ulow).unwrap();
        prop_assert!(close(b.lambda2, c * a.lambda2, 1e-10));
        prop_assert!(close(b.eta, c * a.eta, 1e-10));
        prop_assert!(close(b.lambda1, c * a.lambda1, 1e-10));
        let v = bounds::lower_bound_value(&d, &bp, &ulow).unwrap();
        let w = bounds::lower_bound_value(&d, &scaled, &ulow).unwrap();
        // exp(lambda1) leaves the f64 range for large |lambda1|
        prop_assume!(v.is_normal() && w.is_normal());
        prop_assert!((w.ln() - c * v.ln()).abs() <= 1e-10 * (c * v.ln()).abs().max(1.0));
    }

    #[test]
    fn bounds_are_permutation_invariant(
        (d, k, alpha, u) in lower_inputs(0.1, 10.0),
        m in vec(1.0..3.0f64, 5),
        shift in 1usize..5,
    ) {
        let n = d.len();
        let m = &m[..n];
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let bp = BoundParams::lower(k.clone(), alpha.clone()).unwrap();
        let bpp = BoundParams::lower(permuted(&k, &perm), permuted(&alpha, &perm)).unwrap();
        let (dp, up, mp, ap) = (permuted(&d, &perm), permuted(&u, &perm), permuted(m, &perm), permuted(&alpha, &perm));
        let a = bounds::lower_levels(&d, &bp, &u).unwrap();
        let b = bounds::lower_levels(&dp, &bpp, &up).unwrap();
        prop_assert!(close(a.lambda1, b.lambda1, 1e-12));
        prop_assert!(close(a.lambda2, b.lambda2, 1e-12));
        prop_assert!(close(a.eta, b.eta, 1e-12));
        prop_assert!(close(
            bounds::upper_bound_sum(&d, &alpha, m, &u).unwrap(),
            bounds::upper_bound_sum(&dp, &ap, &mp, &up).unwrap(),
            1e-12
        ));
        prop_assert!(close(
            bounds::upper_bound_product(&d, &alpha, m, &u).unwrap(),
            bounds::upper_bound_product(&dp, &ap, &mp, &up).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn equal_diffusion_reduces(
        (_, k, alpha, ulow) in lower_inputs(0.1, 10.0),
        d in log_uniform(0.1, 10.0),
    ) {
        let n = k.len();
        let bp = BoundParams::lower(k, alpha).unwrap();
        let ds = vec![d; n];
        let lv = bounds::lower_levels(&ds, &bp, &ulow).unwrap();
        prop_assert!((lv.lambda1 - lv.lambda2).abs() <= 1e-12);
        prop_assert!((lv.lambda1 - d * lv.eta).abs() <= 1e-12);
        let general = bounds::lower_bound_value(&ds, &bp, &ulow).unwrap().powf(1.0 / d);
        let closed = bounds::lower_bound_equal_diffusion(&bp, &ulow).unwrap();
        prop_assert!(close(general, closed, 1e-10));
    }

    #[test]
    fn upper_levels_are_ordered((d, alpha, m, uhigh) in upper_inputs(0.1, 10.0)) {
        let lv = bounds::upper_levels(&d, &alpha, &m, &uhigh).unwrap();
        let dmin = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let dmax = d.iter().cloned().fold(0.0, f64::max);
        let mid = lv.eta * dmin;
        prop_assert!(lv.lambda2 <= mid * (1.0 + 1e-15));
        prop_assert!(mid <= lv.lambda1);
        if dmax == dmin {
            prop_assert!(close(lv.lambda2, lv.lambda1, 1e-15));
        } else {
            prop_assert!(mid < lv.lambda1);
        }
    }

    #[test]
    fn product_bound_is_sum_over_mean((d, alpha, m, uhigh) in upper_inputs(0.1, 10.0)) {
        let n = d.len() as f64;
        let sum = bounds::upper_bound_sum(&d, &alpha, &m, &uhigh).unwrap();
        let product = bounds::upper_bound_product(&d, &alpha, &m, &uhigh).unwrap();
        let mean = alpha.iter().map(|a| a.ln()).sum::<f64>() / n;
        prop_assert!(close(product, sum / (n * mean.exp()), 1e-14));
    }

    #[test]
    fn equal_weights_reduction((d, alpha, m, uhigh) in upper_inputs(0.1, 10.0)) {
        let same = vec![alpha[0]; d.len()];
        let general = bounds::upper_bound_product(&d, &same, &m, &uhigh).unwrap();
        let reduced = bounds::upper_bound_product_equal_weights(&d, &m, &uhigh).unwrap();
        prop_assert!(close(general, reduced, 1e-12));
    }

    #[test]
    fn lv_reaction_is_affine(
        a1 in log_uniform(0.25, 4.0),
        a2 in log_uniform(0.25, 4.0),
        kappa in log_uniform(0.25, 4.0),
        u in vec(0.0..3.0f64, 2),
        w in vec(0.0..3.0f64, 2),
    ) {
        let sys = lv2_system(Lv2Params::new(a1, a2, kappa)).unwrap();
        let f = |x: &[f64]| eval_reaction(&sys.spec, x).unwrap();
        let sum: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + b).collect();
        let (fu, fw, f0, fs) = (f(&u), f(&w), f(&[0.0, 0.0]), f(&sum));
        for i in 0..2 {
            prop_assert!((fu[i] + fw[i] - f0[i] - fs[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn lv_preset_is_consistent(
        a1 in log_uniform(0.01, 100.0),
        a2 in log_uniform(0.01, 100.0),
        kappa in log_uniform(0.01, 100.0),
    ) {
        let sys = lv2_system(Lv2Params::new(a1, a2, kappa)).unwrap();
        let lo = sys.region.lower().unwrap();
        let hi = sys.region.upper().unwrap();
        prop_assert!(lo[0] <= hi[0] && lo[1] <= hi[1]);
        for e in &sys.equilibria {
            prop_assert!(is_equilibrium(&sys.spec, &e.state, 1e-12).unwrap());
        }
    }

    #[test]
    fn pq_increase_in_every_coordinate(
        (d, k, alpha, ulow) in lower_inputs(0.1, 10.0),
        m in vec(1.0..3.0f64, 5),
        u in vec(0.0..5.0f64, 5),
        j in 0usize..5,
    ) {
        let n = d.len();
        let j = j % n;
        let u = &u[..n];
        let lower = BarrierConstruction::lower(&d, &BoundParams::lower(k, alpha.clone()).unwrap(), &ulow).unwrap();
        let upper = BarrierConstruction::upper(&d, &alpha, &m[..n], &ulow).unwrap();
        let mut v = u.to_vec();
        v[j] += 1e-3;
        for bc in [&lower, &upper] {
            let (p0, q0) = bc.eval_pq(u).unwrap();
            let (p1, q1) = bc.eval_pq(&v).unwrap();
            prop_assert!(p1 > p0 && q1 > q0);
        }
    }

    #[test]
    fn lower_intercepts_ordered_over_wide_sweep((d, k, alpha, ulow) in lower_inputs(1e-2, 1e2)) {
        let bc = BarrierConstruction::lower(&d, &BoundParams::lower(k, alpha).unwrap(), &ulow).unwrap();
        prop_assert!(bc.intercepts_ordered(&bc.intercepts()));
    }

    #[test]
    fn upper_intercepts_ordered_over_wide_sweep((d, alpha, m, uhigh) in upper_inputs(1e-2, 1e2)) {
        let bc = BarrierConstruction::upper(&d, &alpha, &m, &uhigh).unwrap();
        prop_assert!(bc.intercepts_ordered(&bc.intercepts()));
    }

    #[test]
    fn ray_point_at_level_lies_on_q2_boundary(
        (d, k, alpha, ulow) in lower_inputs(0.1, 10.0),
        m in vec(1.0..3.0f64, 5),
        dir in vec(0.05..1.0f64, 5),
    ) {
        let n = d.len();
        let dir = &dir[..n];
        let lower = BarrierConstruction::lower(&d, &BoundParams::lower(k, alpha.clone()).unwrap(), &ulow).unwrap();
        let upper = BarrierConstruction::upper(&d, &alpha, &m[..n], &ulow).unwrap();
        for bc in [&lower, &upper] {
            let lambda2 = bc.levels().lambda2;
            let at = |t: f64| -> Vec<f64> { dir.iter().map(|x| t * x).collect() };
            let q = |t: f64| bc.eval_pq(&at(t)).unwrap().1;
            // q(0) <= lambda2 in both modes; grow the ray until q passes it
            let (mut lo, mut hi) = (0.0, 1.0);
            while q(hi) < lambda2 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if q(mid) < lambda2 { lo = mid } else { hi = mid }
            }
            let tol = 1e-10 * lambda2.abs().max(1.0);
            prop_assert!((q(hi) - lambda2).abs() <= tol);
            // the closed level set contains the point on one side only
            let inside = bc.membership(&at(lo)).unwrap().in_q2;
            let outside = bc.membership(&at(hi * (1.0 + 1e-6))).unwrap().in_q2;
            prop_assert!(inside != outside);
        }
    }

    #[test]
    fn shrinking_lower_thresholds_keeps_h1(
        a1 in log_uniform(0.25, 4.0),
        a2 in log_uniform(0.25, 4.0),
        kappa in log_uniform(0.25, 4.0),
        ulow in vec(log_uniform(0.05, 5.0), 2),
        shrink in vec(0.0..1.0f64, 2),
    ) {
        let sys = lv2_system(Lv2Params::new(a1, a2, kappa)).unwrap();
        let big = HypothesisRegion::new(Some(ulow.clone()), None).unwrap();
        let small_ulow: Vec<f64> = ulow.iter().zip(&shrink).map(|(u, s)| u * s.max(1e-3)).collect();
        let small = HypothesisRegion::new(Some(small_ulow), None).unwrap();
        if check_h1(&sys.spec, &big, 1000, 0).unwrap().holds {
            prop_assert!(check_h1(&sys.spec, &small, 1000, 0).unwrap().holds);
        }
    }

    #[test]
    fn growing_upper_thresholds_keeps_h2(
        a1 in log_uniform(0.25, 4.0),
        a2 in log_uniform(0.25, 4.0),
        kappa in log_uniform(0.25, 4.0),
        uhigh in vec(log_uniform(0.05, 5.0), 2),
        grow in vec(1.0..10.0f64, 2),
    ) {
        let sys = lv2_system(Lv2Params::new(a1, a2, kappa)).unwrap();
        let small = HypothesisRegion::new(None, Some(uhigh.clone())).unwrap();
        let big_uhigh: Vec<f64> = uhigh.iter().zip(&grow).map(|(u, g)| u * g).collect();
        let big = HypothesisRegion::new(None, Some(big_uhigh)).unwrap();
        if check_h2(&sys.spec, &small, DEFAULT_BOX_FACTOR, 1000, 0).unwrap().holds {
            prop_assert!(check_h2(&sys.spec, &big, DEFAULT_BOX_FACTOR, 1000, 0).unwrap().holds);
        }
    }

    #[test]
    fn preset_thresholds_satisfy_both_hypotheses(
        a1 in log_uniform(0.01, 100.0),
        a2 in log_uniform(0.01, 100.0),
        kappa in log_uniform(0.01, 100.0),
    ) {
        let sys = lv2_system(Lv2Params::new(a1, a2, kappa)).unwrap();
        let h1 = check_h1(&sys.spec, &sys.region, 1000, 0).unwrap();
        let h2 = check_h2(&sys.spec, &sys.region, DEFAULT_BOX_FACTOR, 1000, 0).unwrap();
        prop_assert!(h1.holds && h1.method == Method::AffineExact);
        prop_assert!(h2.holds && h2.method == Method::AffineExact);
    }
}
