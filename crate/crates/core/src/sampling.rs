//! Seeded samplers used by the falsification checks and parameter sweeps.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

/// Deterministic generator for a master seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Log-uniform draw from `[lo, hi)`; both ends must be positive.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    math::exp(uniform(rng, math::ln(lo), math::ln(hi)))
}

/// Point uniform over the box `[0, upper_i]`.
pub fn in_box<R: Rng + ?Sized>(rng: &mut R, upper: &[f64]) -> Vec<f64> {
    upper.iter().map(|&b| b * rng.random::<f64>()).collect()
}

/// Point uniform over the scaled simplex `{u >= 0, sum u_i / scale_i <= 1}`.
///
/// Uses the flat Dirichlet construction: `n + 1` standard exponentials,
/// normalized, with the last coordinate discarded as slack.
pub fn in_simplex<R: Rng + ?Sized>(rng: &mut R, scale: &[f64]) -> Vec<f64> {
    let n = scale.len();
    let mut e: Vec<f64> = (0..=n)
        .map(|_| {
            // 1 - U lies in (0, 1], so the log is finite
            -math::ln(1.0 - rng.random::<f64>())
        })
        .collect();
    let total: f64 = e.iter().sum();
    e.truncate(n);
    e.iter_mut()
        .zip(scale)
        .for_each(|(x, s)| *x = *x / total * s);
    e
}
