//! Direct dynamics of skew products `(theta, x) -> (theta + w, f(theta, x))`:
//! periodic invariant curves, Lyapunov exponents, the reducibility
//! indicator and continuation of reducibility-loss boundaries.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::analytic::{max_theta, min_theta, ExtremumPolicy, PeriodicFn, QPMap};
use crate::config::RenormConfig;
use crate::error::{RenormError, Result};
use crate::families::NormalizedFamily;

/// Fourier modes used to represent invariant curves.
pub const CURVE_MODES: usize = 32;
const LYAPUNOV_NODES: usize = 4096;
const INDICATOR_NODES: usize = 512;
const LYAPUNOV_FLOOR: f64 = 1e-300;
const TRANSIENT: usize = 10_000;
const MAX_PERIOD_LEVEL: u32 = 10;
const PERIOD_FIT_TOL: f64 = 1e-7;
const RECURRENCE_TOL: f64 = 1e-9;
// derivatives of orbits through the critical point round to this size
const NUMERIC_ZERO_DERIVATIVE: f64 = 1e-13;
const NEWTON_STEPS: usize = 40;
const ALPHA_TOL: f64 = 1e-12;
/// Indicator values within this of 0 count as on a boundary.
pub const INDICATOR_TOL: f64 = 1e-10;

/// Fiber map of a skew product over a rigid rotation.
pub trait SkewMap: Sync {
    /// `(f(theta, x), D_x f(theta, x))`.
    fn step(&self, theta: f64, x: f64) -> (f64, f64);
    /// Whether `x` is an admissible fiber coordinate.
    fn contains(&self, x: f64) -> bool;
    /// Critical point of the unforced map; the curve branch through its
    /// neighbourhood is the one tracked.
    fn critical_point(&self) -> f64;
}

impl SkewMap for QPMap {
    fn step(&self, theta: f64, x: f64) -> (f64, f64) {
        self.eval_real_with_dx_unchecked(theta, x)
    }

    fn contains(&self, x: f64) -> bool {
        x.is_finite() && (x - self.domain().center).abs() <= self.domain().radius
    }

    fn critical_point(&self) -> f64 {
        0.0
    }
}

fn escape(theta: f64, x: f64) -> RenormError {
    RenormError::OrbitEscape {
        theta: theta.rem_euclid(1.0),
        x,
    }
}

/// `x`-projection after `steps` iterates starting at `(theta, x)`.
pub fn iterate_x<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    theta: f64,
    x: f64,
    steps: usize,
) -> Result<f64> {
    Ok(f_iter(f, omega, steps, theta, x)?.0)
}

/// `(f^m(theta, x), D_x f^m(theta, x))` with
/// `f^m(theta, x) = f(theta + (m - 1) w, f^{m-1}(theta, x))`.
pub fn f_iter<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    m: usize,
    theta: f64,
    x: f64,
) -> Result<(f64, f64)> {
    let (mut y, mut d) = (x, 1.0);
    for j in 0..m {
        let t = theta + j as f64 * omega;
        if !f.contains(y) {
            return Err(escape(t, y));
        }
        let (fy, dfy) = f.step(t, y);
        y = fy;
        d *= dfy;
    }
    if !f.contains(y) || !d.is_finite() {
        return Err(escape(theta + m as f64 * omega, y));
    }
    Ok((y, d))
}

/// `(f^{2^n}(theta, x), D_x f^{2^n}(theta, x))`.
pub fn f_pow<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    theta: f64,
    x: f64,
) -> Result<(f64, f64)> {
    f_iter(f, omega, 1usize << n, theta, x)
}

/// A `2^n`-periodic invariant curve `x(theta + 2^n w) = f^{2^n}(theta, x(theta))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCurve {
    pub n: u32,
    pub omega: f64,
    pub x: PeriodicFn,
    /// `int ln |D_x f^{2^n}(theta, x(theta))| d theta`, floored.
    pub lyapunov: f64,
    /// Whether the integrand hit the floor somewhere.
    pub lyapunov_floor: bool,
    /// Sup of the invariance defect on a dense grid.
    pub residual: f64,
}

/// Trigonometric-interpolation matrix taking nodal values at
/// `theta_l = l / m` to values at `theta_j + s`.
fn shift_matrix(m: usize, s: f64) -> DMatrix<f64> {
    let k = m / 2;
    DMatrix::from_fn(m, m, |j, l| {
        let d = (j as f64 - l as f64) / m as f64 + s;
        let mut v = 1.0;
        for q in 1..=k {
            v += 2.0 * (TAU * q as f64 * d).cos();
        }
        v / m as f64
    })
}

fn nodes(m: usize) -> Vec<f64> {
    (0..m).map(|l| l as f64 / m as f64).collect()
}

/// Least-squares trigonometric fit of scattered samples; returns the fit
/// and the largest pointwise misfit.
fn ls_fit(samples: &[(f64, f64)], k: usize) -> Result<(PeriodicFn, f64)> {
    let cols = 2 * k + 1;
    let a = DMatrix::from_fn(samples.len(), cols, |i, j| {
        let t = samples[i].0;
        match j {
            0 => 1.0,
            j if j % 2 == 1 => (TAU * ((j + 1) / 2) as f64 * t).cos(),
            j => (TAU * (j / 2) as f64 * t).sin(),
        }
    });
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| RenormError::LinAlg(e.to_string()))?;
    let misfit = (&a * &sol - &b).amax();
    let mut c = vec![num_complex::Complex64::new(sol[0], 0.0)];
    for q in 1..=k {
        c.push(num_complex::Complex64::new(sol[2 * q - 1] / 2.0, -sol[2 * q] / 2.0));
    }
    Ok((PeriodicFn::new(c), misfit))
}

/// Seed for the `2^n` curve from a long forward orbit of the critical point.
///
/// The orbit is split into residue classes modulo each candidate period; the
/// smallest period whose classes are all fitted by smooth curves is the
/// settled period. The class passing closest to the critical point is returned.
pub fn transient_seed<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    modes: usize,
) -> Result<PeriodicFn> {
    let expected = 1usize << n;
    let w = omega.rem_euclid(1.0);
    if w.min(1.0 - w) < 1e-12 {
        return fiber_seed(f, n, modes);
    }
    let per_class = 4 * (2 * modes + 1);
    let max_p = 1usize << MAX_PERIOD_LEVEL.max(n);
    let mut theta = 0.0;
    let mut x = f.critical_point();
    for _ in 0..TRANSIENT {
        if !f.contains(x) {
            return Err(escape(theta, x));
        }
        x = f.step(theta, x).0;
        theta = (theta + omega).rem_euclid(1.0);
    }
    let mut orbit = Vec::with_capacity(per_class * max_p);
    for _ in 0..per_class * max_p {
        if !f.contains(x) {
            return Err(escape(theta, x));
        }
        orbit.push((theta, x));
        x = f.step(theta, x).0;
        theta = (theta + omega).rem_euclid(1.0);
    }
    for level in 0..=MAX_PERIOD_LEVEL.max(n) {
        let p = 1usize << level;
        let fits: Vec<(PeriodicFn, f64)> = (0..p)
            .into_par_iter()
            .map(|r| {
                let class: Vec<(f64, f64)> = orbit
                    .iter()
                    .skip(r)
                    .step_by(p)
                    .take(per_class)
                    .copied()
                    .collect();
                ls_fit(&class, modes)
            })
            .collect::<Result<_>>()?;
        if fits.iter().all(|(_, e)| *e < PERIOD_FIT_TOL) {
            if p != expected {
                return Err(RenormError::PeriodMismatch {
                    expected,
                    found: p,
                });
            }
            let c = f.critical_point();
            let (curve, _) = fits
                .into_iter()
                .min_by(|a, b| {
                    let da: f64 = a.0.samples(64).iter().map(|v| (v - c).abs()).sum();
                    let db: f64 = b.0.samples(64).iter().map(|v| (v - c).abs()).sum();
                    da.total_cmp(&db)
                })
                .expect("at least one class");
            return Ok(curve);
        }
    }
    Err(RenormError::PeriodMismatch { expected, found: 0 })
}

/// Seed for a zero rotation, where every fiber is an independent 1-D map:
/// transients per node, then a recurrence test for the period.
fn fiber_seed<M: SkewMap + ?Sized>(f: &M, n: u32, modes: usize) -> Result<PeriodicFn> {
    let expected = 1usize << n;
    let max_p = 1usize << MAX_PERIOD_LEVEL.max(n);
    let c = f.critical_point();
    let samples: Vec<(f64, f64, usize)> = nodes(4 * (2 * modes + 1))
        .into_par_iter()
        .map(|t| {
            let mut x = c;
            for _ in 0..TRANSIENT {
                if !f.contains(x) {
                    return Err(escape(t, x));
                }
                x = f.step(t, x).0;
            }
            let mut cycle = vec![x];
            let mut y = x;
            for _ in 0..max_p {
                y = f.step(t, y).0;
                if !f.contains(y) {
                    return Err(escape(t, y));
                }
                cycle.push(y);
            }
            let p = (0..=MAX_PERIOD_LEVEL.max(n))
                .map(|l| 1usize << l)
                .find(|&p| (cycle[p] - x).abs() < RECURRENCE_TOL)
                .unwrap_or(0);
            let nearest = cycle[..p.max(1)]
                .iter()
                .copied()
                .min_by(|a, b| (a - c).abs().total_cmp(&(b - c).abs()))
                .expect("nonempty cycle");
            Ok((t, nearest, p))
        })
        .collect::<Result<_>>()?;
    let found = samples.iter().map(|s| s.2).max().unwrap_or(0);
    if samples.iter().any(|s| s.2 != expected) {
        return Err(RenormError::PeriodMismatch { expected, found });
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.1)).collect();
    Ok(ls_fit(&pts, modes)?.0)
}

/// Newton refinement of a `2^n` curve from a seed.
pub fn refine_curve<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    seed: &PeriodicFn,
    cfg: &RenormConfig,
) -> Result<InvariantCurve> {
    refine_curve_modes(f, omega, n, seed, CURVE_MODES, cfg)
}

pub fn refine_curve_modes<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    seed: &PeriodicFn,
    modes: usize,
    cfg: &RenormConfig,
) -> Result<InvariantCurve> {
    let period = 1usize << n;
    let m = 2 * modes + 1;
    let th = nodes(m);
    let s = (period as f64 * omega).rem_euclid(1.0);
    let shift = shift_matrix(m, s);
    let mut x = DVector::from_iterator(m, th.iter().map(|&t| seed.eval(t)));
    let mut defect = f64::INFINITY;
    for _ in 0..NEWTON_STEPS {
        let g: Vec<(f64, f64)> = th
            .par_iter()
            .zip(x.as_slice().par_iter())
            .map(|(&t, &xv)| f_iter(f, omega, period, t, xv))
            .collect::<Result<_>>()?;
        let gv = DVector::from_iterator(m, g.iter().map(|p| p.0));
        let rhs = &shift * &x - gv;
        let new_defect = rhs.amax();
        if new_defect <= 1e-14 || (new_defect >= defect * 0.5 && new_defect < cfg.tol_residual * 1e-2) {
            defect = new_defect;
            break;
        }
        defect = new_defect;
        let mut jac = shift.clone();
        for (j, p) in g.iter().enumerate() {
            jac[(j, j)] -= p.1;
        }
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| RenormError::LinAlg("singular curve Jacobian".into()))?;
        x -= step;
    }
    if !defect.is_finite() {
        return Err(RenormError::NoConvergence {
            iterations: NEWTON_STEPS,
            residual: defect,
        });
    }
    let curve = PeriodicFn::from_samples(x.as_slice(), modes)?;
    let residual = curve_residual(f, omega, n, &curve)?;
    if residual > cfg.tol_residual {
        return Err(RenormError::NoConvergence {
            iterations: NEWTON_STEPS,
            residual,
        });
    }
    if n > 0 {
        let half = curve_residual(f, omega, n - 1, &curve)?;
        if half <= cfg.tol_residual.max(1e3 * residual) {
            return Err(RenormError::PeriodMismatch {
                expected: period,
                found: period / 2,
            });
        }
    }
    let (lyapunov, lyapunov_floor) = lyapunov(f, omega, n, &curve, LYAPUNOV_NODES)?;
    Ok(InvariantCurve {
        n,
        omega,
        x: curve,
        lyapunov,
        lyapunov_floor,
        residual,
    })
}

/// Sup over a 4096-node grid of `|x(theta + 2^n w) - f^{2^n}(theta, x(theta))|`.
pub fn curve_residual<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    x: &PeriodicFn,
) -> Result<f64> {
    let period = 1usize << n;
    let shift = period as f64 * omega;
    let r: Vec<f64> = nodes(LYAPUNOV_NODES)
        .par_iter()
        .map(|&t| Ok((x.eval(t + shift) - f_iter(f, omega, period, t, x.eval(t))?.0).abs()))
        .collect::<Result<_>>()?;
    Ok(r.into_iter().fold(0.0, f64::max))
}

/// Mean of `ln |D_x f^{2^n}|` along the curve over `count` nodes, with the
/// integrand floored at `ln 1e-300`.
pub fn lyapunov<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    x: &PeriodicFn,
    count: usize,
) -> Result<(f64, bool)> {
    let period = 1usize << n;
    let vals: Vec<(f64, bool)> = nodes(count)
        .par_iter()
        .map(|&t| {
            let d = f_iter(f, omega, period, t, x.eval(t))?.1.abs();
            Ok(if d < LYAPUNOV_FLOOR.max(NUMERIC_ZERO_DERIVATIVE) {
                (LYAPUNOV_FLOOR.ln(), true)
            } else {
                (d.ln(), false)
            })
        })
        .collect::<Result<_>>()?;
    let floor = vals.iter().any(|v| v.1);
    Ok((vals.iter().map(|v| v.0).sum::<f64>() / count as f64, floor))
}

/// Seed by transient iteration and refine by Newton.
pub fn find_invariant_curve<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    cfg: &RenormConfig,
) -> Result<InvariantCurve> {
    let seed = transient_seed(f, omega, n, CURVE_MODES)?;
    refine_curve(f, omega, n, &seed, cfg)
}

/// `theta -> D_x f^{2^n}(theta, x(theta))` as a periodic function.
pub fn indicator_function<M: SkewMap + ?Sized>(
    c: &InvariantCurve,
    f: &M,
    omega: f64,
) -> Result<PeriodicFn> {
    let period = 1usize << c.n;
    let vals: Vec<f64> = nodes(INDICATOR_NODES)
        .par_iter()
        .map(|&t| Ok(f_iter(f, omega, period, t, c.x.eval(t))?.1))
        .collect::<Result<_>>()?;
    PeriodicFn::from_samples(&vals, (INDICATOR_NODES - 1) / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indicator {
    pub min: f64,
    pub max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub degenerate_min: bool,
    pub degenerate_max: bool,
}

/// Minimum and maximum over `theta` of `D_x f^{2^n}(theta, x(theta))`.
pub fn reducibility_indicator<M: SkewMap + ?Sized>(
    c: &InvariantCurve,
    f: &M,
    omega: f64,
    cfg: &RenormConfig,
) -> Result<Indicator> {
    let g = indicator_function(c, f, omega)?;
    let policy = ExtremumPolicy {
        tol_degenerate: cfg.tol_degenerate,
        tol_twin: cfg.tol_residual,
        ..ExtremumPolicy::default()
    };
    let lo = min_theta(&g, &policy);
    let hi = max_theta(&g, &policy);
    Ok(Indicator {
        min: lo.value,
        max: hi.value,
        theta_min: lo.theta,
        theta_max: hi.theta,
        degenerate_min: lo.degenerate,
        degenerate_max: hi.degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonMembership {
    pub in_plus: bool,
    pub in_minus: bool,
    pub lyapunov: f64,
    pub lyapunov_floor: bool,
    pub indicator_min: f64,
    pub indicator_max: f64,
    pub degenerate_extremum: bool,
}

/// Evaluate the three conditions defining the reducibility-loss sets:
/// an attracting `2^n` curve (Lyapunov exponent below `-K0`) whose fiber
/// derivative has minimum (plus) or maximum (minus) equal to zero.
pub fn upsilon_membership<M: SkewMap + ?Sized>(
    f: &M,
    omega: f64,
    n: u32,
    cfg: &RenormConfig,
) -> UpsilonMembership {
    let res = find_invariant_curve(f, omega, n, cfg)
        .and_then(|c| Ok((reducibility_indicator(&c, f, omega, cfg)?, c)));
    match res {
        Ok((ind, c)) => {
            let attracting = c.lyapunov < -cfg.k0;
            UpsilonMembership {
                in_plus: attracting && ind.min.abs() <= INDICATOR_TOL && ind.max >= -INDICATOR_TOL,
                in_minus: attracting && ind.max.abs() <= INDICATOR_TOL && ind.min <= INDICATOR_TOL,
                lyapunov: c.lyapunov,
                lyapunov_floor: c.lyapunov_floor,
                indicator_min: ind.min,
                indicator_max: ind.max,
                degenerate_extremum: ind.degenerate_min || ind.degenerate_max,
            }
        }
        Err(_) => UpsilonMembership {
            in_plus: false,
            in_minus: false,
            lyapunov: f64::NAN,
            lyapunov_floor: false,
            indicator_min: f64::NAN,
            indicator_max: f64::NAN,
            degenerate_extremum: false,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub eps: f64,
    pub alpha: f64,
    pub indicator_min: f64,
    pub indicator_max: f64,
    pub lyapunov: f64,
}

struct Probe {
    value: f64,
    curve: InvariantCurve,
    ind: Indicator,
}

fn probe(
    fam: &dyn NormalizedFamily,
    alpha: f64,
    eps: f64,
    omega: f64,
    n: u32,
    which: Branch,
    seed: &PeriodicFn,
    cfg: &RenormConfig,
) -> Result<Probe> {
    let map = fam.raw_map(alpha, eps);
    let curve = match refine_curve(map.as_ref(), omega, n, seed, cfg) {
        Ok(c) => c,
        Err(_) => find_invariant_curve(map.as_ref(), omega, n, cfg)?,
    };
    if curve.lyapunov >= -cfg.k0 {
        return Err(RenormError::NonAttracting {
            lyapunov: curve.lyapunov,
            threshold: -cfg.k0,
        });
    }
    let ind = reducibility_indicator(&curve, map.as_ref(), omega, cfg)?;
    let value = match which {
        Branch::Plus => ind.min,
        Branch::Minus => ind.max,
    };
    Ok(Probe { value, curve, ind })
}

/// Solve `indicator_min = 0` (plus) or `indicator_max = 0` (minus) in
/// `alpha` at fixed `eps`, starting from `guess`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_alpha(
    n: u32,
    omega: f64,
    fam: &dyn NormalizedFamily,
    eps: f64,
    which: Branch,
    guess: f64,
    seed: &PeriodicFn,
    cfg: &RenormConfig,
) -> Result<(BoundaryPoint, PeriodicFn)> {
    let lost = |reason: String| RenormError::RootLost { eps, reason };
    let p0 = probe(fam, guess, eps, omega, n, which, seed, cfg)
        .map_err(|e| lost(format!("at the initial guess: {e}")))?;
    if p0.value == 0.0 {
        return Ok((point(eps, guess, &p0), p0.curve.x));
    }
    // the indicator decreases through the cascade in alpha
    let dir = p0.value.signum();
    let mut h = (eps * 1e-2).max(1e-10);
    let (mut a_in, mut p_in) = (guess, p0);
    let (a_out, p_out) = loop {
        let a = a_in + dir * h;
        let p = probe(fam, a, eps, omega, n, which, &p_in.curve.x, cfg)
            .map_err(|e| lost(format!("while bracketing at alpha = {a}: {e}")))?;
        if p.value.signum() != p_in.value.signum() {
            break (a, p);
        }
        a_in = a;
        p_in = p;
        h *= 2.0;
        if h > 1.0 {
            return Err(lost("no sign change".into()));
        }
    };
    let (mut lo, mut hi) = if a_in < a_out { (a_in, a_out) } else { (a_out, a_in) };
    let (mut p_lo, mut p_hi) = if a_in < a_out { (p_in, p_out) } else { (p_out, p_in) };
    while hi - lo > ALPHA_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = probe(fam, mid, eps, omega, n, which, &p_lo.curve.x, cfg)
            .map_err(|e| lost(format!("during bisection at alpha = {mid}: {e}")))?;
        if p.value.signum() == p_lo.value.signum() {
            lo = mid;
            p_lo = p;
        } else {
            hi = mid;
            p_hi = p;
        }
    }
    let (a, p) = if p_lo.value.abs() <= p_hi.value.abs() {
        (lo, p_lo)
    } else {
        (hi, p_hi)
    };
    Ok((point(eps, a, &p), p.curve.x))
}

fn point(eps: f64, alpha: f64, p: &Probe) -> BoundaryPoint {
    BoundaryPoint {
        eps,
        alpha,
        indicator_min: p.ind.min,
        indicator_max: p.ind.max,
        lyapunov: p.curve.lyapunov,
    }
}

/// Continue the reducibility-loss boundary born at `(alpha_n, 0)` over an
/// ascending list of positive `eps`.
pub fn trace_boundary(
    n: u32,
    omega: f64,
    fam: &dyn NormalizedFamily,
    eps_list: &[f64],
    which: Branch,
    cfg: &RenormConfig,
) -> Result<Vec<BoundaryPoint>> {
    if eps_list.is_empty()
        || eps_list[0] <= 0.0
        || eps_list.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(RenormError::DomainError(
            "eps list must be positive and strictly ascending".into(),
        ));
    }
    let alpha_n = fam.superstable_alpha(n as usize, cfg)?;
    let map = fam.raw_map(alpha_n, eps_list[0]);
    let mut seed = transient_seed(map.as_ref(), omega, n, CURVE_MODES)
        .map_err(|e| RenormError::RootLost {
            eps: eps_list[0],
            reason: e.to_string(),
        })?;
    let mut out: Vec<BoundaryPoint> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let guess = match out.as_slice() {
            [] => alpha_n,
            [p] => alpha_n + (p.alpha - alpha_n) * eps / p.eps,
            [.., p, q] => q.alpha + (q.alpha - p.alpha) / (q.eps - p.eps) * (eps - q.eps),
        };
        let (pt, x) = boundary_alpha(n, omega, fam, eps, which, guess, &seed, cfg)?;
        seed = x;
        out.push(pt);
    }
    Ok(out)
}

/// Ratio-2 ladder `eps_max {1/8, 1/4, 1/2, 1}` with `eps_max = 1e-3 / 8^(n-1)`.
///
/// The `eps`-width of the region where the `2^n` curve persists shrinks by
/// roughly the modulus of the leading forced eigenvalue per level.
pub fn eps_ladder(n: u32) -> Vec<f64> {
    let top = 1e-3 / 8f64.powi(n.max(1) as i32 - 1);
    [0.125, 0.25, 0.5, 1.0].iter().map(|f| f * top).collect()
}

/// Slope `d alpha / d eps` at `eps = 0` from boundary points on a ratio-2
/// ladder, by repeated Richardson extrapolation of `(alpha - alpha_n) / eps`.
/// Returns the extrapolated slope and the change of the last extrapolation step.
pub fn richardson_slope(alpha_n: f64, points: &[BoundaryPoint]) -> (f64, f64) {
    let mut pts: Vec<&BoundaryPoint> = points.iter().collect();
    pts.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let mut level: Vec<f64> = pts.iter().map(|p| (p.alpha - alpha_n) / p.eps).collect();
    let mut change = f64::NAN;
    let mut factor = 2.0;
    while level.len() > 1 {
        let next: Vec<f64> = level
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        change = (next[next.len() - 1] - level[level.len() - 1]).abs();
        level = next;
        factor *= 2.0;
    }
    (level[0], change)
}

/// Extrapolate `alpha(eps)` to `eps = 0` from a ratio-2 ladder.
pub fn richardson_intercept(points: &[BoundaryPoint]) -> f64 {
    let mut pts: Vec<&BoundaryPoint> = points.iter().collect();
    pts.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let mut level: Vec<f64> = pts.iter().map(|p| p.alpha).collect();
    let mut factor = 2.0;
    while level.len() > 1 {
        level = level
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 2.0;
    }
    level[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Reducible,
    BoundaryPlus,
    BoundaryMinus,
    Nonreducible,
    NoCurve,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Reducible => "reducible",
            Classification::BoundaryPlus => "boundary_plus",
            Classification::BoundaryMinus => "boundary_minus",
            Classification::Nonreducible => "nonreducible",
            Classification::NoCurve => "no_curve",
        }
    }

    pub fn from_indicator(min: f64, max: f64, tol: f64) -> Self {
        if min.abs() <= tol && max > 0.0 {
            Classification::BoundaryPlus
        } else if max.abs() <= tol && min < 0.0 {
            Classification::BoundaryMinus
        } else if min > 0.0 || max < 0.0 {
            Classification::Reducible
        } else {
            Classification::Nonreducible
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityScanPoint {
    pub alpha: f64,
    pub eps: f64,
    pub indicator_min: f64,
    pub indicator_max: f64,
    pub lyapunov: f64,
    pub classification: Classification,
}

/// Classify every point of an `(alpha, eps)` grid by the `2^n` curve's
/// reducibility indicator.
pub fn scan(
    fam: &dyn NormalizedFamily,
    omega: f64,
    n: u32,
    alphas: &[f64],
    epss: &[f64],
    cfg: &RenormConfig,
) -> Vec<ReducibilityScanPoint> {
    let grid: Vec<(f64, f64)> = epss
        .iter()
        .flat_map(|&e| alphas.iter().map(move |&a| (a, e)))
        .collect();
    grid.par_iter()
        .map(|&(alpha, eps)| {
            let map = fam.raw_map(alpha, eps);
            let res = find_invariant_curve(map.as_ref(), omega, n, cfg)
                .and_then(|c| Ok((reducibility_indicator(&c, map.as_ref(), omega, cfg)?, c)));
            match res {
                Ok((ind, c)) if c.lyapunov < -cfg.k0 => ReducibilityScanPoint {
                    alpha,
                    eps,
                    indicator_min: ind.min,
                    indicator_max: ind.max,
                    lyapunov: c.lyapunov,
                    classification: Classification::from_indicator(ind.min, ind.max, INDICATOR_TOL),
                },
                _ => ReducibilityScanPoint {
                    alpha,
                    eps,
                    indicator_min: f64::NAN,
                    indicator_max: f64::NAN,
                    lyapunov: f64::NAN,
                    classification: Classification::NoCurve,
                },
            }
        })
        .collect()
}
