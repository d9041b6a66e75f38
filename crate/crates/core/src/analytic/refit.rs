use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::DiscDomain;
use crate::error::{RenormError, Result};

/// Sampling circles sit at this fraction of the disc radius.
pub const REFIT_RADIUS_FRACTION: f64 = 0.9;

const OVERFLOW_GUARD: f64 = 1e14;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Taylor coefficients (about `domain.center`, degree `degree`) of the
/// function sampled by `f` on the circle of radius `0.9 * domain.radius`.
///
/// `nodes` must exceed `degree`; the coefficients above `degree` are the
/// truncation tail and are dropped.
pub fn refit_circle<F>(
    domain: &DiscDomain,
    degree: usize,
    nodes: usize,
    f: F,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    assert!(nodes > degree, "refit needs more nodes than the degree");
    let mut samples = domain
        .circle(REFIT_RADIUS_FRACTION, nodes)
        .into_iter()
        .map(&f)
        .collect::<Result<Vec<_>>>()?;
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if !scale.is_finite() {
        return Err(RenormError::IllConditioned("non-finite sample".into()));
    }
    fft_forward(&mut samples);
    coefficients_from_spectrum(domain, degree, &samples, scale)
}

fn coefficients_from_spectrum(
    domain: &DiscDomain,
    degree: usize,
    spectrum: &[Complex64],
    scale: f64,
) -> Result<Vec<Complex64>> {
    let n = spectrum.len() as f64;
    let rho = REFIT_RADIUS_FRACTION * domain.radius;
    let mut out = Vec::with_capacity(degree + 1);
    let mut rho_k = 1.0;
    let mut r_k = 1.0;
    for s in spectrum.iter().take(degree + 1) {
        let c = *s / (n * rho_k);
        if !(c.norm() * r_k <= OVERFLOW_GUARD * (scale + 1.0)) {
            return Err(RenormError::IllConditioned(format!(
                "coefficient {} of size {:e}",
                out.len(),
                c.norm()
            )));
        }
        out.push(c);
        rho_k *= rho;
        r_k *= domain.radius;
    }
    Ok(out)
}

/// Fourier-Taylor coefficients of a function on `T x disc`.
///
/// Returns `modes[k][j]` for `k = 0..=k_theta`, the coefficient of
/// `exp(2 pi i k theta) (z - center)^j`. Negative modes are the conjugate
/// mirror for real-analytic functions and are not returned.
pub fn refit_torus<F>(
    domain: &DiscDomain,
    k_theta: usize,
    degree: usize,
    theta_nodes: usize,
    nodes: usize,
    f: F,
) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(f64, Complex64) -> Result<Complex64> + Sync,
{
    use rayon::prelude::*;
    assert!(theta_nodes > 2 * k_theta, "too few theta nodes");
    let circle = domain.circle(REFIT_RADIUS_FRACTION, nodes);
    // rows: theta index, cols: circle index
    let rows = (0..theta_nodes)
        .into_par_iter()
        .map(|l| {
            let theta = l as f64 / theta_nodes as f64;
            circle
                .iter()
                .map(|&z| f(theta, z))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.norm()));
    if !scale.is_finite() {
        return Err(RenormError::IllConditioned("non-finite sample".into()));
    }
    let mut modes = Vec::with_capacity(k_theta + 1);
    let mut column = vec![Complex64::new(0.0, 0.0); theta_nodes];
    let mut per_mode = vec![vec![Complex64::new(0.0, 0.0); nodes]; k_theta + 1];
    for j in 0..nodes {
        for (l, row) in rows.iter().enumerate() {
            column[l] = row[j];
        }
        fft_forward(&mut column);
        for (k, target) in per_mode.iter_mut().enumerate() {
            target[j] = column[k] / theta_nodes as f64;
        }
    }
    for mut series in per_mode {
        fft_forward(&mut series);
        modes.push(coefficients_from_spectrum(domain, degree, &series, scale)?);
    }
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_polynomial() {
        let d = DiscDomain::default();
        // (z - 0.2)^3 - 2 (z - 0.2) + 0.5
        let c = refit_circle(&d, 6, 32, |z| {
            let w = z - 0.2;
            Ok(w * w * w - 2.0 * w + 0.5)
        })
        .unwrap();
        let expect = [0.5, -2.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn recovers_torus_modes() {
        let d = DiscDomain::default();
        let m = refit_torus(&d, 3, 4, 16, 32, |t, z| {
            let w = z - 0.2;
            let c = (std::f64::consts::TAU * t).cos();
            let s = (std::f64::consts::TAU * 2.0 * t).sin();
            Ok(1.0 + w * c + w * w * s)
        })
        .unwrap();
        assert!((m[0][0] - 1.0).norm() < 1e-13);
        assert!((m[1][1] - 0.5).norm() < 1e-13);
        assert!((m[2][2] - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        assert!(m[3].iter().all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn rejects_nan() {
        let d = DiscDomain::default();
        let r = refit_circle(&d, 4, 16, |_| Ok(Complex64::new(f64::NAN, 0.0)));
        assert!(matches!(r, Err(RenormError::IllConditioned(_))));
    }
}
