use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::refit::refit_circle;
use super::DiscDomain;
use crate::error::{RenormError, Result};

/// Real-analytic map on a disc, stored as real Taylor coefficients about
/// the disc center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMap1D {
    domain: DiscDomain,
    coeffs: Vec<f64>,
}

fn horner<T>(coeffs: &[T], w: Complex64) -> Complex64
where
    T: Copy + Into<Complex64>,
{
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c.into())
}

fn horner_real(coeffs: &[f64], w: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c)
}

/// Re-expand `sum a_j (x - from)^j` about `to`.
fn shift_center<T>(coeffs: &[T], from: f64, to: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    // x - from = (x - to) + s with s = to - from; repeated synthetic division.
    let s = to - from;
    let mut b: Vec<T> = coeffs.to_vec();
    let n = b.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            b[j] = b[j] + b[j + 1] * s;
        }
    }
    b
}

impl AnalyticMap1D {
    pub fn new(domain: DiscDomain, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Taylor series needs at least one coefficient");
        Self { domain, coeffs }
    }

    pub fn zero(domain: DiscDomain, degree: usize) -> Self {
        Self::new(domain, vec![0.0; degree + 1])
    }

    pub fn constant(domain: DiscDomain, value: f64, degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[0] = value;
        Self::new(domain, c)
    }

    pub fn identity(domain: DiscDomain, degree: usize) -> Self {
        Self::from_power_coeffs(domain, &[0.0, 1.0], degree)
    }

    /// Build from monomial coefficients `sum p_j x^j` (about the origin),
    /// re-centered exactly on `domain` and padded or truncated to `degree`.
    pub fn from_power_coeffs(domain: DiscDomain, power: &[f64], degree: usize) -> Self {
        let mut c = shift_center(power, 0.0, domain.center);
        c.resize(degree + 1, 0.0);
        Self::new(domain, c)
    }

    /// Sample `f` on the refit circle and recover the Taylor coefficients.
    pub fn from_fn<F>(domain: DiscDomain, degree: usize, nodes: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let c = refit_circle(&domain, degree, nodes, f)?;
        Ok(Self::new(domain, c.into_iter().map(|v| v.re).collect()))
    }

    pub fn domain(&self) -> &DiscDomain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Re-expand the same polynomial on another disc.
    pub fn recenter(&self, domain: DiscDomain) -> Self {
        Self::new(
            domain,
            shift_center(&self.coeffs, self.domain.center, domain.center),
        )
    }

    /// Monomial coefficients about the origin.
    pub fn power_coeffs(&self) -> Vec<f64> {
        shift_center(&self.coeffs, self.domain.center, 0.0)
    }

    pub fn with_degree(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, 0.0);
        Self::new(self.domain, c)
    }

    /// Horner evaluation; fails outside the closed disc.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.domain.check(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z - self.domain.center)
    }

    pub fn eval_real(&self, x: f64) -> Result<f64> {
        self.domain.check(Complex64::new(x, 0.0))?;
        Ok(horner_real(&self.coeffs, x - self.domain.center))
    }

    /// Value and first derivative at a real point.
    pub fn eval_with_derivative(&self, x: f64) -> Result<(f64, f64)> {
        self.domain.check(Complex64::new(x, 0.0))?;
        let w = x - self.domain.center;
        let (mut p, mut dp) = (0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * w + p;
            p = p * w + c;
        }
        Ok((p, dp))
    }

    /// Term-by-term derivative (degree drops by one, kept at least 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(self.domain, 0.0, 0);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| k as f64 * a)
            .collect();
        Self::new(self.domain, c)
    }

    /// `self o g`, expressed on `g`'s disc with degree `max(deg f, deg g)`.
    pub fn compose(&self, g: &AnalyticMap1D, nodes: usize) -> Result<Self> {
        let degree = self.degree().max(g.degree());
        Self::from_fn(g.domain, degree, nodes, |z| {
            let w = g.eval_unchecked(z);
            self.domain.check_image(w)?;
            Ok(self.eval_unchecked(w))
        })
    }

    /// `x -> self(a x)` on the same disc.
    pub fn scale_arg(&self, a: f64, nodes: usize) -> Result<Self> {
        Self::from_fn(self.domain, self.degree(), nodes, |z| {
            let w = z * a;
            self.domain.check_image(w)?;
            Ok(self.eval_unchecked(w))
        })
    }

    /// Upper bound of the supremum on the disc: `sum |c_k| r^k`.
    pub fn sup_norm_bound(&self) -> f64 {
        let r = self.domain.radius;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.abs())
    }

    /// Supremum over `n` equispaced points of the real interval `[lo, hi]`.
    pub fn sup_on_interval(&self, lo: f64, hi: f64, n: usize) -> Result<f64> {
        let mut m = 0.0f64;
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            m = m.max(self.eval_real(x)?.abs());
        }
        Ok(m)
    }

    /// Largest scaled coefficient among the top quarter of the series.
    pub fn tail_estimate(&self) -> f64 {
        let n = self.coeffs.len();
        let start = n - (n / 4).max(1);
        let r = self.domain.radius;
        self.coeffs
            .iter()
            .enumerate()
            .skip(start)
            .map(|(k, c)| c.abs() * r.powi(k as i32))
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.domain, other.domain, "maps live on different discs");
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let c = (0..n)
            .map(|i| op(get(&self.coeffs, i), get(&other.coeffs, i)))
            .collect();
        Self::new(self.domain, c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn to_complex(&self) -> ComplexMap1D {
        ComplexMap1D::new(
            self.domain,
            self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    /// Largest coefficient difference, scaled by `r^k`.
    pub fn scaled_distance(&self, other: &Self) -> f64 {
        (self - other).sup_norm_bound()
    }
}

impl Add for &AnalyticMap1D {
    type Output = AnalyticMap1D;
    fn add(self, rhs: Self) -> AnalyticMap1D {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AnalyticMap1D {
    type Output = AnalyticMap1D;
    fn sub(self, rhs: Self) -> AnalyticMap1D {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &AnalyticMap1D {
    type Output = AnalyticMap1D;
    fn mul(self, rhs: f64) -> AnalyticMap1D {
        self.scale(rhs)
    }
}

impl Neg for &AnalyticMap1D {
    type Output = AnalyticMap1D;
    fn neg(self) -> AnalyticMap1D {
        self.scale(-1.0)
    }
}

/// Analytic map with complex Taylor coefficients (a single Fourier mode
/// `c_k(z)` of a quasi-periodic map).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMap1D {
    domain: DiscDomain,
    coeffs: Vec<Complex64>,
}

impl ComplexMap1D {
    pub fn new(domain: DiscDomain, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { domain, coeffs }
    }

    pub fn domain(&self) -> &DiscDomain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.domain.check(z)?;
        Ok(horner(&self.coeffs, z - self.domain.center))
    }

    /// Coefficient-wise conjugate: the mirror mode `c_{-k}`.
    pub fn conj(&self) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn re(&self) -> AnalyticMap1D {
        AnalyticMap1D::new(self.domain, self.coeffs.iter().map(|c| c.re).collect())
    }

    pub fn im(&self) -> AnalyticMap1D {
        AnalyticMap1D::new(self.domain, self.coeffs.iter().map(|c| c.im).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.domain, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_same_domain(a: &DiscDomain, b: &DiscDomain) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(RenormError::DomainError(format!(
            "maps live on different discs {a:?} and {b:?}"
        )))
    }
}
