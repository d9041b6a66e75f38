use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::refit::fft_forward;
use crate::error::{RenormError, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Real-valued function on the circle `R/Z` stored by Fourier coefficients
/// `c_{-K}..c_K` with `c_{-k} = conj(c_k)`.
///
/// Only `c_0..c_K` are kept in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeriodicRepr", into = "PeriodicRepr")]
pub struct PeriodicFn {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodicRepr {
    coeffs: Vec<Complex64>,
}

impl TryFrom<PeriodicRepr> for PeriodicFn {
    type Error = RenormError;

    fn try_from(r: PeriodicRepr) -> Result<Self> {
        Self::from_full(&r.coeffs)
    }
}

impl From<PeriodicFn> for PeriodicRepr {
    fn from(p: PeriodicFn) -> Self {
        PeriodicRepr { coeffs: p.full_coeffs() }
    }
}

impl PeriodicFn {
    /// From `c_0..c_K`; the imaginary part of `c_0` is dropped.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    /// From the full list `c_{-K}..c_K` (odd length, Hermitian).
    pub fn from_full(full: &[Complex64]) -> Result<Self> {
        if full.len() % 2 == 0 {
            return Err(RenormError::Artifact(format!(
                "periodic function needs an odd number of coefficients, got {}",
                full.len()
            )));
        }
        let k = full.len() / 2;
        let scale = full.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for j in 0..=k {
            let (neg, pos) = (full[k - j], full[k + j]);
            if (neg - pos.conj()).norm() > HERMITIAN_TOL * scale {
                return Err(RenormError::Artifact(format!(
                    "coefficients are not Hermitian at k = {j}"
                )));
            }
        }
        Ok(Self::new(full[k..].to_vec()))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![Complex64::new(c, 0.0)])
    }

    /// `a cos(2 pi k theta) + b sin(2 pi k theta)`.
    pub fn trig(k: usize, a: f64, b: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        if k == 0 {
            coeffs[0] = Complex64::new(a, 0.0);
        } else {
            coeffs[k] = Complex64::new(a / 2.0, -b / 2.0);
        }
        Self::new(coeffs)
    }

    /// Interpolate uniform samples `g(l / n)`, `l = 0..n`, keeping `|k| <= k_max`.
    pub fn from_samples(samples: &[f64], k_max: usize) -> Result<Self> {
        let n = samples.len();
        if n < 2 * k_max + 1 {
            return Err(RenormError::DomainError(format!(
                "{n} samples cannot resolve {k_max} modes"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(RenormError::IllConditioned("non-finite sample".into()));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        fft_forward(&mut buf);
        let mut coeffs: Vec<Complex64> = buf[..=k_max].iter().map(|c| c / n as f64).collect();
        if n % 2 == 0 && k_max == n / 2 {
            coeffs[k_max] *= 0.5;
        }
        Ok(Self::new(coeffs))
    }

    pub fn from_fn<F: Fn(f64) -> f64>(k_max: usize, nodes: usize, f: F) -> Result<Self> {
        let n = nodes.max(2 * k_max + 1);
        let samples: Vec<f64> = (0..n).map(|l| f(l as f64 / n as f64)).collect();
        Self::from_samples(&samples, k_max)
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c_0..c_K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_{-K}..c_K`.
    pub fn full_coeffs(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.coeffs.iter().skip(1).rev().map(|c| c.conj()).collect();
        out.extend_from_slice(&self.coeffs);
        out
    }

    pub fn mode(&self, k: i64) -> Complex64 {
        let c = self
            .coeffs
            .get(k.unsigned_abs() as usize)
            .copied()
            .unwrap_or_default();
        if k < 0 {
            c.conj()
        } else {
            c
        }
    }

    /// `(g, g', g'')` at `theta`.
    pub fn eval_with_derivatives(&self, theta: f64) -> (f64, f64, f64) {
        let e = Complex64::from_polar(1.0, TAU * theta);
        let mut ek = e;
        let (mut g, mut d1, mut d2) = (self.coeffs[0].re, 0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = TAU * k as f64;
            let v = 2.0 * c * ek;
            g += v.re;
            d1 -= w * v.im;
            d2 -= w * w * v.re;
            ek *= e;
        }
        (g, d1, d2)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let e = Complex64::from_polar(1.0, TAU * theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            acc = (acc + c) * e;
        }
        self.coeffs[0].re + 2.0 * acc.re
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|l| self.eval(l as f64 / n as f64)).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * Complex64::new(0.0, TAU * k as f64))
                .collect(),
        )
    }

    /// `theta -> g(theta + s)`.
    pub fn shift(&self, s: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * Complex64::from_polar(1.0, TAU * k as f64 * s))
                .collect(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    op(
                        self.coeffs.get(k).copied().unwrap_or_default(),
                        other.coeffs.get(k).copied().unwrap_or_default(),
                    )
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b * t)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Upper bound of the supremum on the circle.
    pub fn sup_norm_bound(&self) -> f64 {
        self.coeffs[0].norm() + 2.0 * self.coeffs.iter().skip(1).map(|c| c.norm()).sum::<f64>()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
