//! Shared fixtures for the benchmarks.

use qprenorm_core::{default_initial, flm_normalized, solve_fixed_point, AnalyticMap1D, QPMap, RenormConfig};

/// Doubling fixed point at the default truncation.
pub fn fixed_point(cfg: &RenormConfig) -> AnalyticMap1D {
    solve_fixed_point(&default_initial(cfg), cfg).expect("fixed point").phi
}

/// A forced logistic map with an attracting period-4 curve.
pub fn forced_map(cfg: &RenormConfig) -> QPMap {
    flm_normalized(3.52, 5e-4, cfg).expect("family member")
}
