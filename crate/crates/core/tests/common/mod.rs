#![allow(dead_code)]

use qprenorm_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

pub fn cfg() -> RenormConfig {
    RenormConfig::default()
}

/// Feigenbaum fixed point at the default truncation, computed once per binary.
pub fn phi() -> &'static FixedPointResult {
    static FP: OnceLock<FixedPointResult> = OnceLock::new();
    FP.get_or_init(|| solve_fixed_point(&default_initial(&cfg()), &cfg()).expect("fixed point"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polynomial with monomial coefficients uniform in `[-scale, scale] / (j + 1)^2`.
pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, scale: f64, n_x: usize) -> AnalyticMap1D {
    let p: Vec<f64> = (0..=degree)
        .map(|j| rng.random_range(-scale..scale) / ((j + 1) * (j + 1)) as f64)
        .collect();
    AnalyticMap1D::from_power_coeffs(cfg().disc, &p, n_x)
}

/// Even unimodal map `1 - c x^2 + d x^4` inside the domain of doubling.
pub fn random_unimodal(rng: &mut ChaCha8Rng, n_x: usize) -> AnalyticMap1D {
    let c = rng.random_range(1.35..1.6);
    let d = rng.random_range(-0.05..0.05);
    AnalyticMap1D::from_power_coeffs(cfg().disc, &[1.0, 0.0, -c, 0.0, d], n_x)
}

pub fn poly(p: &[f64]) -> AnalyticMap1D {
    AnalyticMap1D::from_power_coeffs(cfg().disc, p, cfg().n_x)
}

/// Random direction with `h(0) = 0`, tangent to the normalized maps.
pub fn random_tangent(rng: &mut ChaCha8Rng, degree: usize, n_x: usize) -> AnalyticMap1D {
    let mut p: Vec<f64> = (0..=degree)
        .map(|j| rng.random_range(-1.0..1.0) / ((j + 1) * (j + 1)) as f64)
        .collect();
    p[0] = 0.0;
    AnalyticMap1D::from_power_coeffs(cfg().disc, &p, n_x)
}
