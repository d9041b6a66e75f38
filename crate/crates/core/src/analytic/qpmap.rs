use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::map1d::check_same_domain;
use super::refit::refit_torus;
use super::{AnalyticMap1D, ComplexMap1D, DiscDomain};
use crate::error::{RenormError, Result};

/// Quasi-periodic forced map `f(theta, z) = sum_k c_k(z) exp(2 pi i k theta)`.
///
/// Only the modes `k = 0..=K` are stored; `c_{-k}` is the coefficient-wise
/// conjugate of `c_k`, which makes `f` real for real `(theta, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPMap {
    domain: DiscDomain,
    band_width: f64,
    #[serde(rename = "coeffs")]
    modes: Vec<Vec<Complex64>>,
}

/// Number of theta samples used to refit a map truncated at `k_theta` modes.
pub(crate) fn theta_nodes(k_theta: usize) -> usize {
    4 * k_theta + 4
}

const DEFAULT_BAND: f64 = 0.05;

impl QPMap {
    pub fn new(domain: DiscDomain, modes: Vec<Vec<Complex64>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(RenormError::DomainError("QPMap needs mode 0".into()));
        }
        let len = modes[0].len();
        if len == 0 || modes.iter().any(|m| m.len() != len) {
            return Err(RenormError::DomainError("ragged mode table".into()));
        }
        let mut modes = modes;
        for c in modes[0].iter_mut() {
            c.im = 0.0;
        }
        Ok(Self {
            domain,
            band_width: DEFAULT_BAND,
            modes,
        })
    }

    /// Embed a one-dimensional map as a theta-independent map.
    pub fn uncoupled(psi: &AnalyticMap1D, k_theta: usize) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); psi.degree() + 1];
        let mut modes = vec![zero; k_theta + 1];
        modes[0] = psi.to_complex().coeffs().to_vec();
        Self {
            domain: *psi.domain(),
            band_width: DEFAULT_BAND,
            modes,
        }
    }

    pub fn zero(domain: DiscDomain, k_theta: usize, degree: usize) -> Self {
        Self {
            domain,
            band_width: DEFAULT_BAND,
            modes: vec![vec![Complex64::new(0.0, 0.0); degree + 1]; k_theta + 1],
        }
    }

    /// Sample `f(theta, z)` on a tensor grid and recover the modes.
    pub fn from_fn<F>(
        domain: DiscDomain,
        k_theta: usize,
        degree: usize,
        nodes: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, Complex64) -> Result<Complex64> + Sync,
    {
        let modes = refit_torus(&domain, k_theta, degree, theta_nodes(k_theta), nodes, f)?;
        Self::new(domain, modes)
    }

    pub fn with_band_width(mut self, rho: f64) -> Self {
        self.band_width = rho;
        self
    }

    pub fn band_width(&self) -> f64 {
        self.band_width
    }

    pub fn domain(&self) -> &DiscDomain {
        &self.domain
    }

    pub fn k_max(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.modes[0].len() - 1
    }

    pub fn modes(&self) -> &[Vec<Complex64>] {
        &self.modes
    }

    /// `c_k` for `|k| <= K`.
    pub fn fourier_mode(&self, k: i64) -> Result<ComplexMap1D> {
        let idx = k.unsigned_abs() as usize;
        if idx > self.k_max() {
            return Err(RenormError::ModeOutOfRange {
                k,
                max: self.k_max(),
            });
        }
        let c = ComplexMap1D::new(self.domain, self.modes[idx].clone());
        Ok(if k < 0 { c.conj() } else { c })
    }

    /// Set mode `k >= 0` (mode 0 is forced real).
    pub fn set_mode(&mut self, k: usize, coeffs: &[Complex64]) -> Result<()> {
        if k > self.k_max() {
            return Err(RenormError::ModeOutOfRange {
                k: k as i64,
                max: self.k_max(),
            });
        }
        let target = &mut self.modes[k];
        target.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (t, c) in target.iter_mut().zip(coeffs) {
            *t = if k == 0 { Complex64::new(c.re, 0.0) } else { *c };
        }
        Ok(())
    }

    /// Theta average `int_0^1 f(theta, x) d theta`.
    pub fn p0(&self) -> AnalyticMap1D {
        AnalyticMap1D::new(self.domain, self.modes[0].iter().map(|c| c.re).collect())
    }

    pub fn eval(&self, theta: f64, z: Complex64) -> Result<Complex64> {
        self.domain.check(z)?;
        Ok(self.eval_unchecked(theta, z))
    }

    pub fn eval_unchecked(&self, theta: f64, z: Complex64) -> Complex64 {
        let w = z - self.domain.center;
        let mut total = Complex64::new(0.0, 0.0);
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
        let mut ek = Complex64::new(1.0, 0.0);
        for (k, mode) in self.modes.iter().enumerate() {
            let (mut pos, mut neg) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for c in mode.iter().rev() {
                pos = pos * w + c;
                if k > 0 {
                    neg = neg * w + c.conj();
                }
            }
            if k == 0 {
                total += pos;
            } else {
                total += pos * ek + neg * ek.conj();
            }
            ek *= e;
        }
        total
    }

    /// Value and `x`-derivative at a real point.
    pub fn eval_real_with_dx(&self, theta: f64, x: f64) -> Result<(f64, f64)> {
        self.domain.check(Complex64::new(x, 0.0))?;
        Ok(self.eval_real_with_dx_unchecked(theta, x))
    }

    pub(crate) fn eval_real_with_dx_unchecked(&self, theta: f64, x: f64) -> (f64, f64) {
        let w = x - self.domain.center;
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
        let mut ek = Complex64::new(1.0, 0.0);
        let (mut val, mut der) = (0.0, 0.0);
        for (k, mode) in self.modes.iter().enumerate() {
            let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for c in mode.iter().rev() {
                dp = dp * w + p;
                p = p * w + c;
            }
            let weight = if k == 0 { 1.0 } else { 2.0 };
            val += weight * (p * ek).re;
            der += weight * (dp * ek).re;
            ek *= e;
        }
        (val, der)
    }

    pub fn eval_real(&self, theta: f64, x: f64) -> Result<f64> {
        Ok(self.eval_real_with_dx(theta, x)?.0)
    }

    /// `partial_x f` mode by mode.
    pub fn derivative_x(&self) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                if m.len() == 1 {
                    vec![Complex64::new(0.0, 0.0)]
                } else {
                    m.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, c)| c * j as f64)
                        .collect()
                }
            })
            .collect();
        Self {
            domain: self.domain,
            band_width: self.band_width,
            modes,
        }
    }

    /// `(theta, x) -> f(theta + s, x)`.
    pub fn shift_theta(&self, s: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let e = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 * s);
                m.iter().map(|c| c * e).collect()
            })
            .collect();
        Self {
            domain: self.domain,
            band_width: self.band_width,
            modes,
        }
    }

    /// Largest scaled coefficient over modes `k != 0`, i.e. a bound of
    /// `||f - p0(f)||` up to a factor `2K`.
    pub fn coupling_size(&self) -> f64 {
        let r = self.domain.radius;
        self.modes
            .iter()
            .skip(1)
            .flat_map(|m| m.iter().enumerate().map(move |(j, c)| c.norm() * r.powi(j as i32)))
            .fold(0.0, f64::max)
    }

    /// `sum_{k != 0} sum_j |c_{k,j}| r^j`, an upper bound of `||f - p0 f||`.
    pub fn coupling_norm_bound(&self) -> f64 {
        let r = self.domain.radius;
        2.0 * self
            .modes
            .iter()
            .skip(1)
            .map(|m| m.iter().rev().fold(0.0, |acc, c| acc * r + c.norm()))
            .sum::<f64>()
    }

    /// Upper bound of the supremum over `T x disc`.
    pub fn sup_norm_bound(&self) -> f64 {
        self.p0().sup_norm_bound() + self.coupling_norm_bound()
    }

    pub fn is_uncoupled(&self, tol: f64) -> bool {
        self.coupling_size() <= tol
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_same_domain(&self.domain, &other.domain)?;
        let kk = self.modes.len().max(other.modes.len());
        let nn = self.modes[0].len().max(other.modes[0].len());
        let zero = Complex64::new(0.0, 0.0);
        let get = |m: &Vec<Vec<Complex64>>, k: usize, j: usize| {
            m.get(k).and_then(|v| v.get(j)).copied().unwrap_or(zero)
        };
        let modes = (0..kk)
            .map(|k| {
                (0..nn)
                    .map(|j| op(get(&self.modes, k, j), get(&other.modes, k, j)))
                    .collect()
            })
            .collect();
        Ok(Self {
            domain: self.domain,
            band_width: self.band_width,
            modes,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b * t)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            domain: self.domain,
            band_width: self.band_width,
            modes: self
                .modes
                .iter()
                .map(|m| m.iter().map(|c| c * s).collect())
                .collect(),
        }
    }

    /// Largest scaled coefficient difference over all modes.
    pub fn scaled_distance(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        let r = self.domain.radius;
        Ok(d.modes
            .iter()
            .flat_map(|m| m.iter().enumerate().map(move |(j, c)| c.norm() * r.powi(j as i32)))
            .fold(0.0, f64::max))
    }

    /// Largest scaled coefficient in mode `k`.
    pub fn mode_size(&self, k: usize) -> f64 {
        let r = self.domain.radius;
        self.modes
            .get(k)
            .map(|m| {
                m.iter()
                    .enumerate()
                    .map(|(j, c)| c.norm() * r.powi(j as i32))
                    .fold(0.0, f64::max)
            })
            .unwrap_or(0.0)
    }
}
