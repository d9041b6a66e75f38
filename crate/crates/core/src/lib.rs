//! Doubling renormalization for quasi-periodically forced unimodal maps.
//!
//! The crate provides the analytic function spaces, the one-dimensional
//! renormalization operator and its fixed point, the quasi-periodic
//! renormalization operator with its linearization, the forced logistic
//! family, and a direct dynamical oracle for reducibility-loss boundaries.

pub mod analytic;
pub mod artifacts;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod qprenorm;
pub mod renorm1d;

pub use analytic::{
    dmin, max_theta, min_theta, AnalyticMap1D, ComplexMap1D, DiscDomain, Extremum,
    ExtremumPolicy, PeriodicFn, QPMap,
};
pub use artifacts::FixedPointArtifact;
pub use config::{golden_mean, RenormConfig};
pub use error::{RenormError, Result};
pub use dynamics::{
    find_invariant_curve, reducibility_indicator, trace_boundary, upsilon_membership, Branch,
    InvariantCurve, ReducibilityScanPoint, SkewMap,
};
pub use families::{
    flm_normalized, renorm_sequences, slopes, superstable_alpha, Flm, Forcing, NormalizedFamily,
    SlopeResult,
};
pub use qprenorm::{
    check_h0, d_qp_renorm, fourier_block, hat_a, l1, l2, l_omega, l_omega_spectrum, qp_renorm,
    r_gamma, renorm_pair, spectrum_sweep, ModePair, SpectrumSweep,
};
pub use renorm1d::{
    check_d_r_delta, check_m_delta, d_renorm_1d, default_initial, dr_spectrum, renorm_1d, solve_fixed_point,
    FixedPointResult, UnimodalCheckReport,
};
pub use num_complex::Complex64;
