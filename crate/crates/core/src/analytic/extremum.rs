use super::PeriodicFn;
use crate::error::{RenormError, Result};

/// Grid density and tolerances for the global extremum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumPolicy {
    pub grid: usize,
    /// `g''(theta_0)` below this marks the minimum degenerate.
    pub tol_degenerate: f64,
    /// A second local minimum whose value is within this of the global one
    /// marks the minimum non-unique.
    pub tol_twin: f64,
}

impl Default for ExtremumPolicy {
    fn default() -> Self {
        Self {
            grid: 1024,
            tol_degenerate: 1e-8,
            tol_twin: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Location in `[0, 1)`.
    pub theta: f64,
    pub value: f64,
    pub degenerate: bool,
}

const MAX_POLISH: usize = 50;
const TWIN_SEPARATION: f64 = 1e-6;

fn wrap(t: f64) -> f64 {
    let w = t.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Safeguarded Newton on `g'` inside `[t - h, t + h]`.
fn polish(g: &PeriodicFn, t0: f64, h: f64) -> (f64, f64) {
    let (lo, hi) = (t0 - h, t0 + h);
    let mut t = t0;
    let mut best = (t0, g.eval(t0));
    for _ in 0..MAX_POLISH {
        let (_, d1, d2) = g.eval_with_derivatives(t);
        let step = if d2 > 0.0 { -d1 / d2 } else { -d1.signum() * h * 0.25 };
        let next = (t + step).clamp(lo, hi);
        let v = g.eval(next);
        if v <= best.1 {
            best = (next, v);
        }
        if (next - t).abs() < 1e-15 {
            break;
        }
        t = next;
    }
    (wrap(best.0), best.1)
}

/// Global minimum of `g` over the circle.
pub fn min_theta(g: &PeriodicFn, policy: &ExtremumPolicy) -> Extremum {
    let n = policy.grid.max(1024).max(8 * g.k_max() + 8);
    let h = 1.0 / n as f64;
    let vals = g.samples(n);
    let mut local: Vec<(f64, f64)> = (0..n)
        .filter(|&l| vals[l] <= vals[(l + n - 1) % n] && vals[l] <= vals[(l + 1) % n])
        .map(|l| polish(g, l as f64 * h, h))
        .collect();
    if local.is_empty() {
        let l = (0..n)
            .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
            .unwrap_or(0);
        local.push(polish(g, l as f64 * h, h));
    }
    let &(theta, value) = local
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let (_, _, d2) = g.eval_with_derivatives(theta);
    let twin = local.iter().any(|&(t, v)| {
        circle_distance(t, theta) > TWIN_SEPARATION && (v - value).abs() <= policy.tol_twin
    });
    Extremum {
        theta,
        value,
        degenerate: d2 < policy.tol_degenerate || twin,
    }
}

/// Global maximum of `g` over the circle.
pub fn max_theta(g: &PeriodicFn, policy: &ExtremumPolicy) -> Extremum {
    let e = min_theta(&g.scale(-1.0), policy);
    Extremum {
        value: -e.value,
        ..e
    }
}

/// Directional derivative of `g -> min g` at `g0` along `g1`.
pub fn dmin(g0: &PeriodicFn, g1: &PeriodicFn, policy: &ExtremumPolicy) -> Result<f64> {
    let e = min_theta(g0, policy);
    if e.degenerate {
        return Err(RenormError::DegenerateMinimum);
    }
    Ok(g1.eval(e.theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_minimum() {
        let g = PeriodicFn::trig(1, 1.0, 0.0);
        let e = min_theta(&g, &ExtremumPolicy::default());
        assert!((e.theta - 0.5).abs() < 1e-12);
        assert!((e.value + 1.0).abs() < 1e-15);
        assert!(!e.degenerate);
        let m = max_theta(&g, &ExtremumPolicy::default());
        assert!(m.theta.min(1.0 - m.theta) < 1e-12 && (m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_is_degenerate() {
        let e = min_theta(&PeriodicFn::constant(0.7), &ExtremumPolicy::default());
        assert_eq!(e.value, 0.7);
        assert!(e.degenerate);
        assert_eq!(
            dmin(&PeriodicFn::constant(0.7), &PeriodicFn::constant(1.0), &ExtremumPolicy::default()),
            Err(RenormError::DegenerateMinimum)
        );
    }

    #[test]
    fn symmetric_double_well_is_degenerate() {
        let e = min_theta(&PeriodicFn::trig(2, 1.0, 0.0), &ExtremumPolicy::default());
        assert!(e.degenerate);
    }

    #[test]
    fn dmin_examples() {
        let p = ExtremumPolicy::default();
        let g0 = PeriodicFn::trig(1, 1.0, 0.0);
        assert!(dmin(&g0, &PeriodicFn::trig(1, 0.0, 1.0), &p).unwrap().abs() < 1e-12);
        assert!((dmin(&g0, &PeriodicFn::constant(1.0), &p).unwrap() - 1.0).abs() < 1e-15);
    }
}
