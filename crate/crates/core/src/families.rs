//! The Forced Logistic family in normalized coordinates, its superstable
//! parameters, the renormalization-iterated directions and the slopes of the
//! reducibility-loss curves born at `(alpha_n, 0)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::analytic::{max_theta, min_theta, AnalyticMap1D, ExtremumPolicy, PeriodicFn, QPMap};
use crate::config::RenormConfig;
use crate::dynamics::{find_invariant_curve, indicator_function, InvariantCurve, SkewMap};
use crate::error::{RenormError, Result};
use crate::qprenorm::{fourier_block, ModePair};
use crate::renorm1d::{check_d_r_delta, d_renorm_1d, renorm_1d};

/// A two-parameter family `c(alpha, eps)` of forced unimodal maps in the
/// normalization `psi(0) = 1`, critical point at 0.
///
/// `c(alpha, 0)` must be uncoupled and `d/d eps c(alpha, 0)` must only
/// contain the Fourier modes `+-1`.
pub trait NormalizedFamily: Sync {
    fn name(&self) -> String;

    /// `c(alpha, eps)` truncated to `cfg.n_x` and `cfg.k_theta`.
    fn map(&self, alpha: f64, eps: f64, cfg: &RenormConfig) -> Result<QPMap>;

    /// The unforced map `c(alpha, 0)`.
    fn psi(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D>;

    /// `d/d alpha c(alpha, 0)`.
    fn partial_alpha(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D>;

    /// `d/d eps c(alpha, 0)` as a mode-1 pair.
    fn partial_eps(&self, alpha: f64, cfg: &RenormConfig) -> Result<ModePair>;

    /// The family in its own coordinates, for direct iteration.
    fn raw_map(&self, alpha: f64, eps: f64) -> Box<dyn SkewMap + Send>;

    /// Parameter whose unforced map has a superstable `2^n` cycle.
    fn superstable_alpha(&self, n: usize, cfg: &RenormConfig) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forcing {
    /// `alpha x (1 - x) (1 + eps cos(2 pi theta))`
    #[default]
    Multiplicative,
    /// `alpha x (1 - x) + eps cos(2 pi theta)`
    Additive,
}

/// The Forced Logistic Map; serialized as `family.json`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flm {
    #[serde(default)]
    pub forcing: Forcing,
}

/// Direct iteration of the FLM in logistic coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlmRaw {
    pub alpha: f64,
    pub eps: f64,
    pub forcing: Forcing,
}

impl SkewMap for FlmRaw {
    fn step(&self, theta: f64, y: f64) -> (f64, f64) {
        let c = (TAU * theta).cos();
        let q = self.alpha * y * (1.0 - y);
        let dq = self.alpha * (1.0 - 2.0 * y);
        match self.forcing {
            Forcing::Multiplicative => (q * (1.0 + self.eps * c), dq * (1.0 + self.eps * c)),
            Forcing::Additive => (q + self.eps * c, dq),
        }
    }

    fn contains(&self, y: f64) -> bool {
        y.is_finite() && (-0.5..=1.5).contains(&y)
    }

    fn critical_point(&self) -> f64 {
        0.5
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha <= 4.0 {
        Ok(())
    } else {
        Err(RenormError::DomainError(format!(
            "alpha = {alpha} outside (2, 4]"
        )))
    }
}

impl Flm {
    pub fn new(forcing: Forcing) -> Self {
        Self { forcing }
    }

    /// Affine scale `s` of the conjugacy `y = 1/2 + s x`.
    pub fn scale(alpha: f64) -> f64 {
        (alpha - 2.0) / 4.0
    }

    /// `x`-profile `g` of the forcing term `eps g(x) cos(2 pi theta)`.
    fn forcing_profile(&self, alpha: f64) -> [f64; 3] {
        match self.forcing {
            Forcing::Multiplicative => [alpha / (alpha - 2.0), 0.0, -alpha * (alpha - 2.0) / 4.0],
            Forcing::Additive => [4.0 / (alpha - 2.0), 0.0, 0.0],
        }
    }
}

impl NormalizedFamily for Flm {
    fn name(&self) -> String {
        match self.forcing {
            Forcing::Multiplicative => "flm-multiplicative".into(),
            Forcing::Additive => "flm-additive".into(),
        }
    }

    fn map(&self, alpha: f64, eps: f64, cfg: &RenormConfig) -> Result<QPMap> {
        let psi = self.psi(alpha, cfg)?;
        let mut f = QPMap::uncoupled(&psi, cfg.k_theta.max(1));
        let g = AnalyticMap1D::from_power_coeffs(cfg.disc, &self.forcing_profile(alpha), cfg.n_x);
        let c1: Vec<Complex64> = g
            .coeffs()
            .iter()
            .map(|&c| Complex64::new(eps * c / 2.0, 0.0))
            .collect();
        f.set_mode(1, &c1)?;
        Ok(f)
    }

    fn psi(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D> {
        check_alpha(alpha)?;
        Ok(AnalyticMap1D::from_power_coeffs(
            cfg.disc,
            &[1.0, 0.0, -alpha * (alpha - 2.0) / 4.0],
            cfg.n_x,
        ))
    }

    fn partial_alpha(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D> {
        check_alpha(alpha)?;
        Ok(AnalyticMap1D::from_power_coeffs(
            cfg.disc,
            &[0.0, 0.0, -(alpha - 1.0) / 2.0],
            cfg.n_x,
        ))
    }

    fn partial_eps(&self, alpha: f64, cfg: &RenormConfig) -> Result<ModePair> {
        check_alpha(alpha)?;
        Ok(ModePair::new(
            AnalyticMap1D::from_power_coeffs(cfg.disc, &self.forcing_profile(alpha), cfg.n_x),
            AnalyticMap1D::zero(cfg.disc, cfg.n_x),
            1,
        ))
    }

    fn raw_map(&self, alpha: f64, eps: f64) -> Box<dyn SkewMap + Send> {
        Box::new(FlmRaw {
            alpha,
            eps,
            forcing: self.forcing,
        })
    }

    fn superstable_alpha(&self, n: usize, _cfg: &RenormConfig) -> Result<f64> {
        superstable_alpha(n)
    }
}

/// A family with the forcing direction replaced by zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unforced<F>(pub F);

impl<F: NormalizedFamily> NormalizedFamily for Unforced<F> {
    fn name(&self) -> String {
        format!("{}-unforced", self.0.name())
    }

    fn map(&self, alpha: f64, _eps: f64, cfg: &RenormConfig) -> Result<QPMap> {
        self.0.map(alpha, 0.0, cfg)
    }

    fn psi(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D> {
        self.0.psi(alpha, cfg)
    }

    fn partial_alpha(&self, alpha: f64, cfg: &RenormConfig) -> Result<AnalyticMap1D> {
        self.0.partial_alpha(alpha, cfg)
    }

    fn partial_eps(&self, alpha: f64, cfg: &RenormConfig) -> Result<ModePair> {
        let p = self.0.partial_eps(alpha, cfg)?;
        Ok(ModePair::new(&p.u * 0.0, &p.v * 0.0, p.k))
    }

    fn raw_map(&self, alpha: f64, _eps: f64) -> Box<dyn SkewMap + Send> {
        self.0.raw_map(alpha, 0.0)
    }

    fn superstable_alpha(&self, n: usize, cfg: &RenormConfig) -> Result<f64> {
        self.0.superstable_alpha(n, cfg)
    }
}

/// The FLM with multiplicative forcing at `(alpha, eps)`, normalized.
pub fn flm_normalized(alpha: f64, eps: f64, cfg: &RenormConfig) -> Result<QPMap> {
    Flm::default().map(alpha, eps, cfg)
}

const MAX_LEVEL: usize = 24;
const SCAN_STEPS: usize = 40;
const BISECT_TOL: f64 = 1e-6;
const NEWTON_ALPHA: usize = 30;

/// `(g^m(1/2), d/d alpha g^m(1/2))` for `g(y) = alpha y (1 - y)`.
fn logistic_orbit(alpha: f64, m: usize) -> (f64, f64) {
    let (mut y, mut dy) = (0.5, 0.0);
    for _ in 0..m {
        let next = alpha * y * (1.0 - y);
        dy = y * (1.0 - y) + alpha * (1.0 - 2.0 * y) * dy;
        y = next;
    }
    (y, dy)
}

/// Superstable parameter `alpha_n` of the logistic map `alpha y (1 - y)`:
/// `1/2` lies on a cycle of minimal period `2^n`.
///
/// Levels are found in order. Level `n` is bracketed by scanning from
/// `alpha_{n-1}` in steps of `(alpha_{n-1} - alpha_{n-2}) / 40`, then
/// refined by bisection and Newton.
pub fn superstable_alpha(n: usize) -> Result<f64> {
    if n > MAX_LEVEL {
        return Err(RenormError::WindowNotFound(n));
    }
    let mut levels = vec![2.0, 1.0 + 5f64.sqrt()];
    while levels.len() <= n {
        let k = levels.len();
        let (prev, gap) = (levels[k - 1], levels[k - 1] - levels[k - 2]);
        levels.push(next_superstable(k, prev, gap)?);
    }
    Ok(levels[n])
}

fn next_superstable(k: usize, prev: f64, gap: f64) -> Result<f64> {
    let m = 1usize << k;
    let h = |a: f64| logistic_orbit(a, m).0 - 0.5;
    let step = gap / SCAN_STEPS as f64;
    let mut lo = prev + step;
    let mut h_lo = h(lo);
    let mut bracket = None;
    for j in 2..=2 * SCAN_STEPS {
        let a = prev + j as f64 * step;
        let h_a = h(a);
        if h_a.signum() != h_lo.signum() {
            bracket = Some((lo, a));
            break;
        }
        lo = a;
        h_lo = h_a;
    }
    let (mut lo, mut hi) = bracket.ok_or(RenormError::WindowNotFound(k))?;
    let s_lo = h(lo).signum();
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if h(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut a = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..NEWTON_ALPHA {
        let (y, dy) = logistic_orbit(a, m);
        let da = (y - 0.5) / dy;
        a -= da;
        if !(lo - BISECT_TOL..=hi + BISECT_TOL).contains(&a) {
            return Err(RenormError::NoConvergence {
                iterations: NEWTON_ALPHA,
                residual: y - 0.5,
            });
        }
        if da.abs() <= 1e-14 * a {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RenormError::NoConvergence {
            iterations: NEWTON_ALPHA,
            residual: h(a),
        });
    }
    if (logistic_orbit(a, m / 2).0 - 0.5).abs() < 1e-8 {
        return Err(RenormError::WindowNotFound(k));
    }
    Ok(a)
}

/// `omega_k`, `f_k`, `u_k`, `v_k` for `k = 0..n`, starting from the unforced
/// map at a superstable parameter and the two family directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormSequences {
    pub alpha: f64,
    pub omegas: Vec<f64>,
    pub f: Vec<AnalyticMap1D>,
    pub u: Vec<AnalyticMap1D>,
    pub v: Vec<ModePair>,
}

impl RenormSequences {
    /// Iterate `count - 1` times from the initial data.
    pub fn from_initial(
        alpha: f64,
        count: usize,
        omega0: f64,
        f0: AnalyticMap1D,
        u0: AnalyticMap1D,
        v0: ModePair,
        cfg: &RenormConfig,
    ) -> Result<Self> {
        if count == 0 {
            return Err(RenormError::DomainError("level must be at least 1".into()));
        }
        let mut s = Self {
            alpha,
            omegas: vec![omega0.rem_euclid(1.0)],
            f: vec![f0],
            u: vec![u0],
            v: vec![v0],
        };
        for k in 1..count {
            let (f, u, v, w) = (&s.f[k - 1], &s.u[k - 1], &s.v[k - 1], s.omegas[k - 1]);
            let report = check_d_r_delta(f, cfg);
            if !report.in_d_r_delta {
                return Err(RenormError::NotRenormalizable {
                    step: k,
                    reason: format!("{report:?}"),
                });
            }
            let step_err = |e: RenormError| RenormError::NotRenormalizable {
                step: k,
                reason: e.to_string(),
            };
            let fk = renorm_1d(f, cfg).map_err(step_err)?;
            let uk = d_renorm_1d(f, u).map_err(step_err)?;
            let vk = fourier_block(f, w, v).map_err(step_err)?;
            s.omegas.push((2.0 * w).rem_euclid(1.0));
            s.f.push(fk);
            s.u.push(uk);
            s.v.push(vk);
        }
        Ok(s)
    }

    pub fn last(&self) -> (f64, &AnalyticMap1D, &AnalyticMap1D, &ModePair) {
        let k = self.f.len() - 1;
        (self.omegas[k], &self.f[k], &self.u[k], &self.v[k])
    }
}

/// Sequences for level `n >= 1`: `k = 0..n-1` starting at `c(alpha_n, 0)`.
pub fn renorm_sequences(
    n: usize,
    omega0: f64,
    fam: &dyn NormalizedFamily,
    cfg: &RenormConfig,
) -> Result<RenormSequences> {
    if n == 0 {
        return Err(RenormError::DomainError("level must be at least 1".into()));
    }
    let alpha = fam.superstable_alpha(n, cfg)?;
    RenormSequences::from_initial(
        alpha,
        n,
        omega0,
        fam.psi(alpha, cfg)?,
        fam.partial_alpha(alpha, cfg)?,
        fam.partial_eps(alpha, cfg)?,
        cfg,
    )
}

/// The attracting period-2 curve of `g` near the critical point.
pub fn invariant_curve_period2(omega: f64, g: &QPMap, cfg: &RenormConfig) -> Result<InvariantCurve> {
    let c = find_invariant_curve(g, omega, 1, cfg)?;
    if c.lyapunov >= -cfg.k0 {
        return Err(RenormError::NonAttracting {
            lyapunov: c.lyapunov,
            threshold: -cfg.k0,
        });
    }
    Ok(c)
}

/// `theta -> D_x g(theta + w, g(theta, x(theta))) D_x g(theta, x(theta))`
/// along the period-2 curve.
#[allow(non_snake_case)]
pub fn G1(omega: f64, g: &QPMap, cfg: &RenormConfig) -> Result<PeriodicFn> {
    let c = invariant_curve_period2(omega, g, cfg)?;
    indicator_function(&c, g, omega)
}

const ORBIT_NEWTON: usize = 60;

/// Multiplier `f'(f(p)) f'(p)` of the 2-cycle through `p` near 0.
pub fn hat_g1(f: &AnalyticMap1D) -> Result<f64> {
    for start in [0.0, 1.0, -0.5, 0.5] {
        let mut x = start;
        let mut ok = false;
        for _ in 0..ORBIT_NEWTON {
            let (y, dy) = f.eval_with_derivative(x)?;
            let (z, dz) = f.eval_with_derivative(y)?;
            let step = (z - x) / (dz * dy - 1.0);
            if !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                ok = true;
                break;
            }
        }
        if !ok {
            continue;
        }
        let (y, dy) = f.eval_with_derivative(x)?;
        if (y - x).abs() < 1e-8 {
            continue;
        }
        let dz = f.eval_with_derivative(y)?.1;
        return Ok(dz * dy);
    }
    Err(RenormError::NoConvergence {
        iterations: ORBIT_NEWTON,
        residual: f64::NAN,
    })
}

/// Tolerance for `|hat_g1(f)| ~ 0` on the maps reached by renormalizing the
/// family at its superstable parameters.
pub const SIGMA1_TOL: f64 = 1e-7;

fn sigma1_data(f1: &AnalyticMap1D) -> Result<(f64, f64)> {
    let m = hat_g1(f1)?;
    if m.abs() > SIGMA1_TOL {
        return Err(RenormError::NotOnSigma1(m.abs()));
    }
    let d1 = f1.eval_with_derivative(1.0)?.1;
    let d2 = f1.derivative().eval_with_derivative(0.0)?.1;
    Ok((d1, d2))
}

fn real_at(c: &crate::analytic::ComplexMap1D, x: f64) -> Result<Complex64> {
    c.eval(Complex64::new(x, 0.0))
}

/// Derivative of `G1` at an uncoupled map `f1` on `Sigma_1`, in direction `h`:
/// `f1'(1) [f1''(0) (f1'(1) h(theta - 2w, 0) + h(theta - w, 1)) + D_x h(theta, 0)]`.
pub fn d_g1_at_sigma1(f1: &AnalyticMap1D, omega: f64, h: &QPMap) -> Result<PeriodicFn> {
    let (d1, d2) = sigma1_data(f1)?;
    let dh = h.derivative_x();
    let coeffs = (0..=h.k_max())
        .map(|k| {
            let c = h.fourier_mode(k as i64)?;
            let dc = dh.fourier_mode(k as i64)?;
            let kk = k as f64;
            let e1 = Complex64::from_polar(1.0, -TAU * kk * omega);
            let e2 = Complex64::from_polar(1.0, -TAU * kk * 2.0 * omega);
            let inner = (real_at(&c, 0.0)? * e2 * d1 + real_at(&c, 1.0)? * e1) * d2;
            Ok((inner + real_at(&dc, 0.0)?) * d1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodicFn::new(coeffs))
}

/// Derivative of the cycle multiplier at `f1` on `Sigma_1` in direction `h`.
pub fn d_hat_g1_at_sigma1(f1: &AnalyticMap1D, h: &AnalyticMap1D) -> Result<f64> {
    let (d1, d2) = sigma1_data(f1)?;
    let (h0, dh0) = h.eval_with_derivative(0.0)?;
    let h1 = h.eval_real(1.0)?;
    Ok(d1 * (d2 * (d1 * h0 + h1) + dh0))
}

/// `d alpha_n^+ / d eps (0)` and `d alpha_n^- / d eps (0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeResult {
    pub n: usize,
    pub alpha_n: f64,
    pub slope_plus: f64,
    pub slope_minus: f64,
    pub theta_star_plus: f64,
    pub theta_star_minus: f64,
    pub degenerate: bool,
}

impl SlopeResult {
    /// Fail if the extremum of the numerator is not unique and non-degenerate.
    pub fn require_nondegenerate(self) -> Result<Self> {
        if self.degenerate {
            Err(RenormError::DegenerateExtremum)
        } else {
            Ok(self)
        }
    }
}

/// Numerator function `D G1 . v_{n-1}` and denominator `D hat G1 . u_{n-1}`
/// at the last element of the sequences.
pub fn slope_terms(seq: &RenormSequences, cfg: &RenormConfig) -> Result<(PeriodicFn, f64)> {
    let (w, f, u, v) = seq.last();
    let num = d_g1_at_sigma1(f, w, &v.to_qpmap(cfg.k_theta.max(v.k))?)?;
    let den = d_hat_g1_at_sigma1(f, u)?;
    Ok((num, den))
}

fn policy(cfg: &RenormConfig) -> ExtremumPolicy {
    ExtremumPolicy {
        tol_degenerate: cfg.tol_degenerate,
        tol_twin: cfg.tol_residual,
        ..ExtremumPolicy::default()
    }
}

/// Slopes from precomputed sequences.
///
/// The plus curve is where the minimum over `theta` of the fiber derivative
/// along the curve vanishes, so `slope_plus = -min(num) / den` and
/// `slope_minus = -max(num) / den`.
pub fn slopes_from_sequences(seq: &RenormSequences, cfg: &RenormConfig) -> Result<SlopeResult> {
    let (num, den) = slope_terms(seq, cfg)?;
    if den.abs() <= cfg.tol_residual {
        return Err(RenormError::ZeroDenominator(den));
    }
    let p = policy(cfg);
    let lo = min_theta(&num, &p);
    let hi = max_theta(&num, &p);
    Ok(SlopeResult {
        n: seq.f.len(),
        alpha_n: seq.alpha,
        slope_plus: -lo.value / den,
        slope_minus: -hi.value / den,
        theta_star_plus: lo.theta,
        theta_star_minus: hi.theta,
        degenerate: lo.degenerate || hi.degenerate,
    })
}

/// Same slopes with the common factor `f'(1) < 0` cancelled from numerator
/// and denominator, which exchanges the roles of minimum and maximum.
/// Returns `(slope_plus, slope_minus)`.
pub fn slopes_cancelled_form(seq: &RenormSequences, cfg: &RenormConfig) -> Result<(f64, f64)> {
    let (_, f, _, _) = seq.last();
    let d1 = f.eval_with_derivative(1.0)?.1;
    let (num, den) = slope_terms(seq, cfg)?;
    let x = num.scale(1.0 / d1);
    let y = den / d1;
    if y.abs() <= cfg.tol_residual {
        return Err(RenormError::ZeroDenominator(y));
    }
    let p = policy(cfg);
    let (lo, hi) = (min_theta(&x, &p), max_theta(&x, &p));
    if d1 < 0.0 {
        Ok((-hi.value / y, -lo.value / y))
    } else {
        Ok((-lo.value / y, -hi.value / y))
    }
}

/// Slopes of the two reducibility-loss curves born at `(alpha_n, 0)`.
pub fn slopes(n: usize, omega0: f64, fam: &dyn NormalizedFamily, cfg: &RenormConfig) -> Result<SlopeResult> {
    slopes_from_sequences(&renorm_sequences(n, omega0, fam, cfg)?, cfg)
}
