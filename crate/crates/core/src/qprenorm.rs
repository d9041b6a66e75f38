//! Quasi-periodic renormalization
//! `T_w(g)(theta, x) = g(theta + w, g(theta, a x)) / a` with
//! `a = int g(theta, 1) d theta`, its derivative, and the Fourier-block
//! operators `L_w` that describe the derivative at uncoupled maps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::analytic::{AnalyticMap1D, DiscDomain, QPMap};
use crate::config::RenormConfig;
use crate::error::{RenormError, Result};
use crate::renorm1d::{check_m_delta, default_nodes, sorted_eigenvalues};

const X_GRID_THETA: usize = 64;
const X_GRID_X: usize = 257;
const H0_SAMPLES: usize = 512;

/// `a = int_0^1 g(theta, 1) d theta`.
pub fn hat_a(g: &QPMap) -> f64 {
    g.p0().eval_unchecked(Complex64::new(1.0, 0.0)).re
}

/// Membership in `X`, tested as in the perturbative criterion: writing
/// `g = f + h` with `f = p0(g)`, the average map must be unimodal with
/// range in `I_delta`, `|h| < delta` and `|h| < gamma` with
/// `gamma = f(1 + delta) + 1 + delta`, and `g` must map `T x I_delta` into
/// `I_delta` on a sample grid. `f(0) = 1` is not required: `T_w` only
/// preserves it at second order in the coupling.
pub fn check_in_x(g: &QPMap, cfg: &RenormConfig) -> Result<()> {
    let p0 = g.p0();
    let r = check_m_delta(&p0, cfg);
    if !(r.monotone_ok && r.range_ok) {
        return Err(RenormError::NotInX(format!("average map not unimodal in I_delta: {r:?}")));
    }
    let (lo, hi) = cfg.interval();
    let gamma = p0.eval_unchecked(Complex64::new(hi, 0.0)).re - lo;
    let mut h_norm = 0.0f64;
    for l in 0..X_GRID_X {
        let x = lo + (hi - lo) * l as f64 / (X_GRID_X - 1) as f64;
        let fx = p0.eval_unchecked(Complex64::new(x, 0.0)).re;
        for i in 0..X_GRID_THETA {
            let t = i as f64 / X_GRID_THETA as f64;
            let y = g.eval_real_with_dx_unchecked(t, x).0;
            if !(lo..=hi).contains(&y) {
                return Err(RenormError::NotInX(format!(
                    "g({t}, {x}) = {y} leaves [{lo}, {hi}]"
                )));
            }
            h_norm = h_norm.max((y - fx).abs());
        }
    }
    if h_norm >= cfg.delta || h_norm >= gamma {
        return Err(RenormError::NotInX(format!(
            "coupling {h_norm} not below delta = {} and gamma = {gamma}",
            cfg.delta
        )));
    }
    Ok(())
}

fn check_scale(a: f64) -> Result<()> {
    if a < 0.0 && a > -1.0 {
        Ok(())
    } else {
        Err(RenormError::DomainError(format!(
            "scale a = {a} outside (-1, 0)"
        )))
    }
}

/// `T_w(g)` at a single point by nested evaluation.
pub fn qp_renorm_at(omega: f64, g: &QPMap, theta: f64, z: Complex64) -> Complex64 {
    let a = hat_a(g);
    g.eval_unchecked(theta + omega, g.eval_unchecked(theta, z * a)) / a
}

fn qp_renorm_unchecked(omega: f64, g: &QPMap, nodes: usize) -> Result<QPMap> {
    let a = hat_a(g);
    check_scale(a)?;
    let d = *g.domain();
    QPMap::from_fn(d, g.k_max(), g.degree(), nodes, |t, z| {
        let w = z * a;
        d.check_image(w)?;
        let y = g.eval_unchecked(t, w);
        d.check_image(y)?;
        Ok(g.eval_unchecked(t + omega, y) / a)
    })
    .map(|f| f.with_band_width(g.band_width()))
}

/// `T_w(g)`, refitted on `g`'s disc and Fourier truncation.
pub fn qp_renorm(omega: f64, g: &QPMap, cfg: &RenormConfig) -> Result<QPMap> {
    let f = qp_renorm_unchecked(omega, g, cfg.m_nodes)?;
    check_in_x(&f, cfg)?;
    Ok(f)
}

/// `(2 w mod 1, T_w(g))`.
pub fn renorm_pair(omega: f64, g: &QPMap, cfg: &RenormConfig) -> Result<(f64, QPMap)> {
    Ok((double_angle(omega), qp_renorm(omega, g, cfg)?))
}

pub fn double_angle(omega: f64) -> f64 {
    (2.0 * omega).rem_euclid(1.0)
}

/// Frechet derivative `DT_w(psi) h`.
pub fn d_qp_renorm(omega: f64, psi: &QPMap, h: &QPMap) -> Result<QPMap> {
    let degree = psi.degree().max(h.degree());
    d_qp_renorm_nodes(omega, psi, h, default_nodes(degree))
}

pub(crate) fn d_qp_renorm_nodes(
    omega: f64,
    psi: &QPMap,
    h: &QPMap,
    nodes: usize,
) -> Result<QPMap> {
    let a = hat_a(psi);
    check_scale(a)?;
    let b = hat_a(h);
    let d = *psi.domain();
    if *h.domain() != d {
        return Err(RenormError::DomainError("directions must share the disc".into()));
    }
    let dpsi = psi.derivative_x();
    let k = psi.k_max().max(h.k_max());
    let degree = psi.degree().max(h.degree());
    QPMap::from_fn(d, k, degree, nodes, |t, z| {
        let w = z * a;
        d.check_image(w)?;
        let y = psi.eval_unchecked(t, w);
        d.check_image(y)?;
        let t1 = t + omega;
        let dy = dpsi.eval_unchecked(t1, y);
        Ok(dy * h.eval_unchecked(t, w) / a + h.eval_unchecked(t1, y) / a
            + dy * dpsi.eval_unchecked(t, w) * z * (b / a)
            - psi.eval_unchecked(t1, y) * (b / (a * a)))
    })
}

/// `u(x) cos(2 pi k theta) + v(x) sin(2 pi k theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub u: AnalyticMap1D,
    pub v: AnalyticMap1D,
    pub k: usize,
}

impl ModePair {
    pub fn new(u: AnalyticMap1D, v: AnalyticMap1D, k: usize) -> Self {
        assert!(k > 0, "mode pairs live on k >= 1");
        Self { u, v, k }
    }

    /// Complex coefficient `c_k = (u - i v) / 2` of `exp(2 pi i k theta)`.
    pub fn mode_coeffs(&self) -> Vec<Complex64> {
        let v = self.v.recenter(*self.u.domain());
        let n = self.u.coeffs().len().max(v.coeffs().len());
        (0..n)
            .map(|j| {
                let u = self.u.coeffs().get(j).copied().unwrap_or(0.0);
                let v = v.coeffs().get(j).copied().unwrap_or(0.0);
                Complex64::new(u / 2.0, -v / 2.0)
            })
            .collect()
    }

    /// Embed as a map with only modes `+-k` populated.
    pub fn to_qpmap(&self, k_theta: usize) -> Result<QPMap> {
        let c = self.mode_coeffs();
        let mut f = QPMap::zero(*self.u.domain(), k_theta, c.len() - 1);
        f.set_mode(self.k, &c)?;
        Ok(f)
    }

    /// Extract the cosine and sine parts of mode `k`.
    pub fn from_qpmap(f: &QPMap, k: usize) -> Result<Self> {
        let c = f.fourier_mode(k as i64)?;
        Ok(Self::new(c.re().scale(2.0), c.im().scale(-2.0), k))
    }

    pub fn scaled_distance(&self, other: &Self) -> f64 {
        self.u.scaled_distance(&other.u).max(self.v.scaled_distance(&other.v))
    }

    fn combine(&self, m: [[f64; 2]; 2]) -> Self {
        let u = &(&self.u * m[0][0]) + &(&self.v * m[0][1]);
        let v = &(&self.u * m[1][0]) + &(&self.v * m[1][1]);
        Self::new(u, v, self.k)
    }
}

fn rotation(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = (TAU * angle).sin_cos();
    [[c, -s], [s, c]]
}

/// `g -> psi'(psi(a z)) g(a z) / a` with `a = psi(1)`.
pub fn l1(psi: &AnalyticMap1D, g: &AnalyticMap1D) -> Result<AnalyticMap1D> {
    l_nodes(psi, g, default_nodes(psi.degree().max(g.degree())), true)
}

/// `g -> g(psi(a z)) / a` with `a = psi(1)`.
pub fn l2(psi: &AnalyticMap1D, g: &AnalyticMap1D) -> Result<AnalyticMap1D> {
    l_nodes(psi, g, default_nodes(psi.degree().max(g.degree())), false)
}

fn l_nodes(psi: &AnalyticMap1D, g: &AnalyticMap1D, nodes: usize, first: bool) -> Result<AnalyticMap1D> {
    let d = *psi.domain();
    let g = g.recenter(d);
    let a = psi.eval_unchecked(Complex64::new(1.0, 0.0)).re;
    let dpsi = psi.derivative();
    AnalyticMap1D::from_fn(d, psi.degree().max(g.degree()), nodes, |z| {
        let w = z * a;
        d.check_image(w)?;
        let y = psi.eval_unchecked(w);
        d.check_image(y)?;
        Ok(if first {
            dpsi.eval_unchecked(y) * g.eval_unchecked(w) / a
        } else {
            g.eval_unchecked(y) / a
        })
    })
}

/// `(u, v) -> (L1 u, L1 v) + Rot(2 pi w) (L2 u, L2 v)` with
/// `Rot(t) = [[cos t, -sin t], [sin t, cos t]]`.
pub fn l_omega(psi: &AnalyticMap1D, omega: f64, p: &ModePair) -> Result<ModePair> {
    let (l1u, l1v) = (l1(psi, &p.u)?, l1(psi, &p.v)?);
    let l2p = ModePair::new(l2(psi, &p.u)?, l2(psi, &p.v)?, p.k).combine(rotation(omega));
    Ok(ModePair::new(&l1u + &l2p.u, &l1v + &l2p.v, p.k))
}

/// Rotation `R_g (u, v) = Rot(2 pi g) (u, v)`.
pub fn r_gamma(gamma: f64, p: &ModePair) -> ModePair {
    p.combine(rotation(gamma))
}

/// The action of `DT_w(psi)` on `u cos(2 pi k theta) + v sin(2 pi k theta)`
/// for uncoupled `psi`, returned in the same cosine and sine form.
///
/// Equals `S L_{k w} S` with `S(u, v) = (u, -v)`.
pub fn fourier_block(psi: &AnalyticMap1D, omega: f64, p: &ModePair) -> Result<ModePair> {
    let flip = |q: &ModePair| ModePair::new(q.u.clone(), -&q.v, q.k);
    Ok(flip(&l_omega(psi, p.k as f64 * omega, &flip(p))?))
}

/// Matrix of a linear operator on the Taylor basis of `domain` in the
/// scaled coordinates `((z - c) / r)^j`, `j = 0..=n`.
pub(crate) fn operator_matrix<F>(domain: DiscDomain, n: usize, op: F) -> Result<DMatrix<f64>>
where
    F: Fn(&AnalyticMap1D) -> Result<AnalyticMap1D> + Sync,
{
    let r = domain.radius;
    let cols: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|j| {
            let mut c = vec![0.0; n + 1];
            c[j] = r.powi(-(j as i32));
            let img = op(&AnalyticMap1D::new(domain, c))?.recenter(domain);
            Ok((0..=n)
                .map(|i| img.coeffs().get(i).copied().unwrap_or(0.0) * r.powi(i as i32))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n + 1, n + 1, |i, j| cols[j][i]))
}

/// Precomputed matrices of `L1` and `L2` for a fixed base map.
#[derive(Debug, Clone)]
pub struct LBlocks {
    pub l1: DMatrix<f64>,
    pub l2: DMatrix<f64>,
}

impl LBlocks {
    pub fn new(psi: &AnalyticMap1D, cfg: &RenormConfig) -> Result<Self> {
        let n = psi.degree();
        let nodes = cfg.m_nodes.max(default_nodes(n));
        let d = *psi.domain();
        Ok(Self {
            l1: operator_matrix(d, n, |g| l_nodes(psi, g, nodes, true))?,
            l2: operator_matrix(d, n, |g| l_nodes(psi, g, nodes, false))?,
        })
    }

    /// Real `2(n+1)` square matrix of `L_w`.
    pub fn l_omega_matrix(&self, omega: f64) -> DMatrix<f64> {
        let m = self.l1.nrows();
        let (s, c) = (TAU * omega).sin_cos();
        let diag = &self.l1 + &self.l2 * c;
        let off = &self.l2 * s;
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, 0), (m, m)).copy_from(&diag);
        out.view_mut((m, m), (m, m)).copy_from(&diag);
        out.view_mut((0, m), (m, m)).copy_from(&(-&off));
        out.view_mut((m, 0), (m, m)).copy_from(&off);
        out
    }

    pub fn spectrum(&self, omega: f64) -> Vec<Complex64> {
        sorted_eigenvalues(self.l_omega_matrix(omega))
    }
}

/// Eigenvalues of `L_w` sorted by decreasing modulus.
pub fn l_omega_spectrum(psi: &AnalyticMap1D, omega: f64, cfg: &RenormConfig) -> Result<Vec<Complex64>> {
    Ok(LBlocks::new(psi, cfg)?.spectrum(omega))
}

/// Largest distance between a non-real eigenvalue and the conjugate of its
/// nearest partner, or between a real eigenvalue and its nearest other
/// real eigenvalue.
pub fn conjugate_pair_defect(ev: &[Complex64]) -> f64 {
    ev.iter()
        .enumerate()
        .map(|(i, l)| {
            ev.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, m)| (m - l.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub omega_grid: Vec<f64>,
    /// Top eigenvalues per grid point, sorted by decreasing modulus.
    pub eigenvalues: Vec<Vec<Complex64>>,
    /// Conjugate-pair defect of the top eigenvalues per grid point.
    pub pair_defect: Vec<f64>,
}

impl SpectrumSweep {
    /// Largest jump of the leading modulus between grid neighbours.
    pub fn max_leading_jump(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| (w[0][0].norm() - w[1][0].norm()).abs())
            .fold(0.0, f64::max)
    }

    /// Grid indices `i` where the nearest-neighbour matching of the top
    /// eigenvalues between `i` and `i + 1` is ambiguous.
    pub fn crossings(&self, tol: f64) -> Vec<usize> {
        self.eigenvalues
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                w[0].iter().any(|l| {
                    let mut d: Vec<f64> = w[1].iter().map(|m| (m - l).norm()).collect();
                    d.sort_by(f64::total_cmp);
                    d.len() > 1 && d[1] - d[0] < tol && d[1] > 1e-12
                })
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Spectra of `L_w` over a grid of rotation numbers, keeping `top`
/// eigenvalues per point.
pub fn spectrum_sweep(
    psi: &AnalyticMap1D,
    grid: &[f64],
    top: usize,
    cfg: &RenormConfig,
) -> Result<SpectrumSweep> {
    let blocks = LBlocks::new(psi, cfg)?;
    let eigenvalues: Vec<Vec<Complex64>> = grid
        .par_iter()
        .map(|&w| {
            let mut ev = blocks.spectrum(w);
            // keep whole conjugate pairs
            let mut n = top.min(ev.len());
            while n < ev.len() && n > 0 && (ev[n].norm() - ev[n - 1].norm()).abs() <= 1e-12 * ev[0].norm().max(1.0) {
                n += 1;
            }
            ev.truncate(n);
            ev
        })
        .collect();
    let pair_defect = eigenvalues.iter().map(|ev| conjugate_pair_defect(ev)).collect();
    Ok(SpectrumSweep {
        omega_grid: grid.to_vec(),
        eigenvalues,
        pair_defect,
    })
}

/// Result of the numerical inclusion checks `closure(aW)` and
/// `closure(psi(aW))` inside `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H0Report {
    pub a: f64,
    /// Largest `|z - c| / r` over the sampled boundary of `aW`.
    pub scaled_disc: f64,
    /// Largest `|psi(z) - c| / r` over the sampled boundary of `aW`.
    pub image_of_scaled_disc: f64,
}

impl H0Report {
    pub fn holds(&self) -> bool {
        self.scaled_disc < 1.0 && self.image_of_scaled_disc < 1.0
    }
}

/// Sample the boundary of `aW` and measure how deep it and its image lie in `W`.
pub fn h0_report(psi: &AnalyticMap1D) -> H0Report {
    let d = *psi.domain();
    let a = psi.eval_unchecked(Complex64::new(1.0, 0.0)).re;
    let (mut s, mut im) = (0.0f64, 0.0f64);
    for l in 0..H0_SAMPLES {
        let z = Complex64::new(d.center, 0.0)
            + Complex64::from_polar(d.radius, TAU * l as f64 / H0_SAMPLES as f64);
        let w = z * a;
        s = s.max(d.distance(w) / d.radius);
        im = im.max(d.distance(psi.eval_unchecked(w)) / d.radius);
    }
    H0Report {
        a,
        scaled_disc: s,
        image_of_scaled_disc: im,
    }
}

pub fn check_h0(psi: &AnalyticMap1D) -> Result<H0Report> {
    let r = h0_report(psi);
    if r.holds() {
        Ok(r)
    } else {
        Err(RenormError::DomainError(format!("inclusion conditions fail: {r:?}")))
    }
}
