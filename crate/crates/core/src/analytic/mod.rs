//! Representations of real-analytic functions used throughout the crate.
//!
//! One-dimensional maps are stored as truncated Taylor series about the
//! center of a complex disc. Quasi-periodic maps `f(theta, x)` carry one such
//! series per Fourier mode, and periodic functions on the circle are stored
//! by their Fourier coefficients. Nonlinear operations (composition,
//! rescaling) are evaluated pointwise on a circle inside the disc and the
//! Taylor coefficients are recovered with an FFT.

mod disc;
mod extremum;
mod map1d;
mod periodic;
mod qpmap;
mod refit;

pub use disc::DiscDomain;
pub use extremum::{dmin, max_theta, min_theta, Extremum, ExtremumPolicy};
pub use map1d::{AnalyticMap1D, ComplexMap1D};
pub use periodic::PeriodicFn;
pub use qpmap::QPMap;
pub use refit::{refit_circle, refit_torus, REFIT_RADIUS_FRACTION};
