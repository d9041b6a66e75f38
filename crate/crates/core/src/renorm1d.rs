//! One-dimensional doubling renormalization `R(psi)(x) = psi(psi(a x)) / a`
//! with `a = psi(1)`, its domain predicates, derivative, fixed point and
//! linearized spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticMap1D, DiscDomain};
use crate::config::RenormConfig;
use crate::error::{RenormError, Result};

const MONOTONE_GRID: usize = 512;
const RANGE_GRID: usize = 2049;
const RESIDUAL_GRID: usize = 1001;
const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 12;

/// Outcome of the unimodality and renormalizability predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodalCheckReport {
    pub psi0: f64,
    pub monotone_ok: bool,
    pub range_ok: bool,
    pub a: f64,
    pub a_prime: f64,
    pub b_prime: f64,
    pub in_m_delta: bool,
    pub in_d_r_delta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub phi: AnalyticMap1D,
    /// Pointwise `sup |R(phi) - phi|` over `I_delta`.
    pub residual: f64,
    /// `phi(1)`.
    pub a: f64,
    pub iterations: usize,
}

/// Starting guess `1 - 1.4 x^2` for the fixed-point Newton iteration.
pub fn default_initial(cfg: &RenormConfig) -> AnalyticMap1D {
    AnalyticMap1D::from_power_coeffs(cfg.disc, &[1.0, 0.0, -1.4], cfg.n_x)
}

/// Refit node count adequate for maps of the given degree.
pub fn default_nodes(degree: usize) -> usize {
    (4 * degree + 8).next_power_of_two().max(64)
}

fn real(psi: &AnalyticMap1D, x: f64) -> f64 {
    psi.eval_unchecked(Complex64::new(x, 0.0)).re
}

fn real_with_derivative(psi: &AnalyticMap1D, x: f64) -> (f64, f64) {
    let c = psi.coeffs();
    let w = x - psi.domain().center;
    let (mut p, mut dp) = (0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * w + p;
        p = p * w + a;
    }
    (p, dp)
}

/// Check membership in `M_delta`: `psi(0) = 1`, `x psi'(x) < 0` and
/// `psi(I_delta)` inside `I_delta`.
pub fn check_m_delta(psi: &AnalyticMap1D, cfg: &RenormConfig) -> UnimodalCheckReport {
    let (lo, hi) = cfg.interval();
    let psi0 = real(psi, 0.0);
    let monotone_ok = (1..=MONOTONE_GRID / 2).all(|l| {
        let x = hi * l as f64 / (MONOTONE_GRID / 2) as f64;
        real_with_derivative(psi, x).1 * x < 0.0 && real_with_derivative(psi, -x).1 * -x < 0.0
    });
    let range_ok = (0..RANGE_GRID).all(|l| {
        let x = lo + (hi - lo) * l as f64 / (RANGE_GRID - 1) as f64;
        let y = real(psi, x);
        y.is_finite() && (lo..=hi).contains(&y)
    });
    let in_m_delta = (psi0 - 1.0).abs() <= cfg.tol_residual && monotone_ok && range_ok;
    let a = real(psi, 1.0);
    let a_prime = (1.0 + cfg.delta) * a;
    UnimodalCheckReport {
        psi0,
        monotone_ok,
        range_ok,
        a,
        a_prime,
        b_prime: real(psi, a_prime),
        in_m_delta,
        in_d_r_delta: false,
    }
}

/// Check membership in the domain of `R_delta`: `psi` in `M_delta`, `a < 0`,
/// `1 > b' > -a'` and `psi(b') < -a'`, all strict with margin `tol_residual`.
pub fn check_d_r_delta(psi: &AnalyticMap1D, cfg: &RenormConfig) -> UnimodalCheckReport {
    let mut r = check_m_delta(psi, cfg);
    let m = cfg.tol_residual;
    let psi_b = real(psi, r.b_prime);
    r.in_d_r_delta = r.in_m_delta
        && r.a < -m
        && r.b_prime < 1.0 - m
        && r.b_prime > -r.a_prime + m
        && psi_b < -r.a_prime - m;
    r
}

/// `R(psi)` evaluated at one point, without refitting.
pub fn renorm_1d_at(psi: &AnalyticMap1D, z: Complex64) -> Complex64 {
    let a = real(psi, 1.0);
    psi.eval_unchecked(psi.eval_unchecked(z * a)) / a
}

fn renorm_unchecked(psi: &AnalyticMap1D, nodes: usize) -> Result<AnalyticMap1D> {
    let a = real(psi, 1.0);
    if !(a.abs() > 0.0) {
        return Err(RenormError::DomainError(format!("psi(1) = {a} cannot be a scale")));
    }
    let d = *psi.domain();
    AnalyticMap1D::from_fn(d, psi.degree(), nodes, |z| {
        let w = z * a;
        d.check_image(w)?;
        let y = psi.eval_unchecked(w);
        d.check_image(y)?;
        Ok(psi.eval_unchecked(y) / a)
    })
}

/// `R_delta(psi)`, refitted on `psi`'s disc with `cfg.m_nodes` samples.
pub fn renorm_1d(psi: &AnalyticMap1D, cfg: &RenormConfig) -> Result<AnalyticMap1D> {
    let report = check_d_r_delta(psi, cfg);
    if !report.in_d_r_delta {
        return Err(RenormError::DomainError(format!(
            "map is outside the domain of R: {report:?}"
        )));
    }
    renorm_unchecked(psi, cfg.m_nodes)
}

/// Derivative `DR(psi) h`.
pub fn d_renorm_1d(psi: &AnalyticMap1D, h: &AnalyticMap1D) -> Result<AnalyticMap1D> {
    d_renorm_1d_nodes(psi, h, default_nodes(psi.degree().max(h.degree())))
}

pub(crate) fn d_renorm_1d_nodes(
    psi: &AnalyticMap1D,
    h: &AnalyticMap1D,
    nodes: usize,
) -> Result<AnalyticMap1D> {
    let d = *psi.domain();
    let hd = h.recenter(d);
    let a = real(psi, 1.0);
    if !(a.abs() > 0.0) {
        return Err(RenormError::DomainError(format!("psi(1) = {a} cannot be a scale")));
    }
    let b = real(&hd, 1.0);
    let dpsi = psi.derivative();
    AnalyticMap1D::from_fn(d, psi.degree().max(h.degree()), nodes, |z| {
        let w = z * a;
        d.check_image(w)?;
        let y = psi.eval_unchecked(w);
        d.check_image(y)?;
        let dy = dpsi.eval_unchecked(y);
        Ok(dy * hd.eval_unchecked(w) / a + hd.eval_unchecked(y) / a
            + dy * dpsi.eval_unchecked(w) * z * (b / a)
            - psi.eval_unchecked(y) * (b / (a * a)))
    })
}

/// `sup |R(psi) - psi|` on a uniform grid of `I_delta`, computed pointwise.
pub fn pointwise_residual(psi: &AnalyticMap1D, cfg: &RenormConfig) -> f64 {
    let (lo, hi) = cfg.interval();
    (0..RESIDUAL_GRID)
        .map(|l| {
            let x = lo + (hi - lo) * l as f64 / (RESIDUAL_GRID - 1) as f64;
            let z = Complex64::new(x, 0.0);
            (renorm_1d_at(psi, z) - psi.eval_unchecked(z)).norm()
        })
        .fold(0.0, f64::max)
}

/// Even map on an origin-centered disc, stored by `c_2, c_4, ..` with `c_0 = 1`.
fn even_map(domain: DiscDomain, even: &[f64]) -> AnalyticMap1D {
    let mut c = vec![0.0; 2 * even.len() + 1];
    c[0] = 1.0;
    for (j, &e) in even.iter().enumerate() {
        c[2 * j + 2] = e;
    }
    AnalyticMap1D::new(domain, c)
}

fn even_part(psi: &AnalyticMap1D, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|j| psi.coeffs().get(2 * j).copied().unwrap_or(0.0))
        .collect()
}

fn even_monomial(domain: DiscDomain, j: usize) -> AnalyticMap1D {
    let mut c = vec![0.0; 2 * j + 1];
    c[2 * j] = 1.0;
    AnalyticMap1D::new(domain, c)
}

/// Matrix of `DR(psi)` on `x^2, x^4, ..` in the scaled basis `(x / r)^{2j}`.
fn even_jacobian(psi: &AnalyticMap1D, m: usize, nodes: usize) -> Result<DMatrix<f64>> {
    let d = *psi.domain();
    let r2 = d.radius * d.radius;
    let cols: Vec<Vec<f64>> = (1..=m)
        .into_par_iter()
        .map(|j| {
            let h = even_monomial(d, j).with_degree(psi.degree());
            let img = d_renorm_1d_nodes(psi, &h, nodes)?;
            Ok(even_part(&img, m)
                .iter()
                .enumerate()
                .map(|(i, v)| v * r2.powi((i + 1) as i32) / r2.powi(j as i32))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(m, m, |i, j| cols[j][i]))
}

fn ensure_even(psi: &AnalyticMap1D, tol: f64) -> Result<Vec<f64>> {
    let p = psi.power_coeffs();
    let scale = p.iter().map(|c| c.abs()).fold(1.0, f64::max);
    if let Some((k, c)) = p
        .iter()
        .enumerate()
        .skip(1)
        .step_by(2)
        .find(|(_, c)| c.abs() > tol * scale)
    {
        return Err(RenormError::DomainError(format!(
            "initial map is not even: x^{k} coefficient {c:e}"
        )));
    }
    Ok(p)
}

/// Newton iteration for the fixed point of `R_delta` among even maps with
/// `psi(0) = 1`.
///
/// The unknowns are the coefficients of `x^2, .., x^{2m}` with
/// `2m <= cfg.n_x`, expanded about the origin on the smallest origin disc
/// containing `cfg.disc`. The result is re-expanded on `cfg.disc`.
pub fn solve_fixed_point(initial: &AnalyticMap1D, cfg: &RenormConfig) -> Result<FixedPointResult> {
    cfg.validate()?;
    let p = ensure_even(initial, cfg.tol_residual)?;
    let d0 = cfg.disc.origin_hull();
    let m = cfg.n_x / 2;
    let mut x: Vec<f64> = (1..=m).map(|j| p.get(2 * j).copied().unwrap_or(0.0)).collect();
    let r2 = d0.radius * d0.radius;

    let mut psi = even_map(d0, &x);
    let mut residual = pointwise_residual(&psi, cfg);
    let mut iterations = 0;
    while residual > cfg.tol_newton {
        if iterations == MAX_NEWTON {
            return Err(RenormError::NoConvergence {
                iterations,
                residual,
            });
        }
        if !check_d_r_delta(&psi, cfg).in_d_r_delta {
            return Err(RenormError::DomainError(format!(
                "Newton iterate {iterations} left the domain of R"
            )));
        }
        let rpsi = renorm_unchecked(&psi, cfg.m_nodes)?;
        let f: Vec<f64> = even_part(&rpsi, m)
            .iter()
            .zip(&x)
            .enumerate()
            .map(|(i, (r, c))| (r - c) * r2.powi((i + 1) as i32))
            .collect();
        let mut jac = even_jacobian(&psi, m, cfg.m_nodes)?;
        for i in 0..m {
            jac[(i, i)] -= 1.0;
        }
        let rhs = nalgebra::DVector::from_vec(f);
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| RenormError::LinAlg("singular Newton matrix".into()))?;

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = x
                .iter()
                .enumerate()
                .map(|(i, c)| c - t * step[i] / r2.powi((i + 1) as i32))
                .collect();
            let cand = even_map(d0, &trial);
            let res = pointwise_residual(&cand, cfg);
            if res.is_finite() && (res < residual || t == 1.0 && res < 10.0 * residual) {
                x = trial;
                psi = cand;
                residual = res;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            return Err(RenormError::NoConvergence {
                iterations,
                residual,
            });
        }
    }
    let phi = psi.with_degree(cfg.n_x).recenter(cfg.disc);
    Ok(FixedPointResult {
        a: real(&phi, 1.0),
        residual: pointwise_residual(&phi, cfg),
        phi,
        iterations,
    })
}

/// Eigenvalues of `DR(phi)` restricted to even directions vanishing at 0,
/// sorted by decreasing modulus.
pub fn dr_spectrum(phi: &AnalyticMap1D, cfg: &RenormConfig) -> Result<Vec<Complex64>> {
    let d0 = phi.domain().origin_hull();
    let psi = phi.recenter(d0);
    let m = phi.degree() / 2;
    let nodes = cfg.m_nodes.max(default_nodes(phi.degree()));
    let jac = even_jacobian(&psi, m, nodes)?;
    Ok(sorted_eigenvalues(jac))
}

pub(crate) fn sorted_eigenvalues(mat: DMatrix<f64>) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = mat.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(k: f64) -> AnalyticMap1D {
        AnalyticMap1D::from_power_coeffs(DiscDomain::default(), &[1.0, 0.0, -k], 12)
    }

    #[test]
    fn m_delta_examples() {
        let cfg = RenormConfig::default();
        assert!(check_m_delta(&quad(1.4), &cfg).in_m_delta);
        let up = AnalyticMap1D::from_power_coeffs(DiscDomain::default(), &[1.0, 0.0, 1.0], 4);
        assert!(!check_m_delta(&up, &cfg).monotone_ok);
        let low = AnalyticMap1D::from_power_coeffs(DiscDomain::default(), &[0.5, 0.0, -1.0], 4);
        let r = check_m_delta(&low, &cfg);
        assert_eq!(r.psi0, 0.5);
        assert!(!r.in_m_delta);
    }

    #[test]
    fn d_r_delta_examples() {
        let cfg = RenormConfig {
            delta: 0.05,
            ..RenormConfig::default()
        };
        let r = check_d_r_delta(&quad(1.4), &cfg);
        assert!(r.in_d_r_delta);
        assert!((r.a + 0.4).abs() < 1e-14);
        assert!((r.a_prime + 0.42).abs() < 1e-14);
        assert!((r.b_prime - (1.0 - 1.4 * 0.42 * 0.42)).abs() < 1e-14);
        let r = check_d_r_delta(&quad(0.5), &cfg);
        assert!((r.a - 0.5).abs() < 1e-14);
        assert!(!r.in_d_r_delta);
    }

    #[test]
    fn renorm_of_quadratic() {
        let cfg = RenormConfig::default();
        let psi = quad(1.4);
        let r = renorm_1d(&psi, &cfg).unwrap();
        assert!((r.eval_real(0.0).unwrap() - 1.0).abs() < 1e-13);
        // (1/a) psi(psi(a)) by scalar arithmetic
        let a: f64 = 1.0 - 1.4;
        let inner = 1.0 - 1.4 * a * a;
        let expect = (1.0 - 1.4 * inner * inner) / a;
        assert!((r.eval_real(1.0).unwrap() - expect).abs() < 1e-12);
        let odd: f64 = r.power_coeffs().iter().skip(1).step_by(2).map(|c| c.abs()).sum();
        assert!(odd < 1e-12);
    }

    #[test]
    fn derivative_is_linear_and_vanishes_at_zero() {
        let psi = quad(1.4);
        let d = *psi.domain();
        let zero = AnalyticMap1D::zero(d, 12);
        assert!(d_renorm_1d(&psi, &zero).unwrap().sup_norm_bound() < 1e-15);
        let h1 = AnalyticMap1D::from_power_coeffs(d, &[0.0, 0.0, 0.3, 0.0, -0.1], 12);
        let h2 = AnalyticMap1D::from_power_coeffs(d, &[0.0, 0.1, 0.0, 0.2], 12);
        let lhs = d_renorm_1d(&psi, &(&(&h1 * 2.0) + &(&h2 * 3.0))).unwrap();
        let rhs = &(&d_renorm_1d(&psi, &h1).unwrap() * 2.0) + &(&d_renorm_1d(&psi, &h2).unwrap() * 3.0);
        assert!(lhs.scaled_distance(&rhs) < 1e-12);
        assert!(d_renorm_1d(&psi, &h1).unwrap().eval_real(0.0).unwrap().abs() < 1e-13);
    }
}
