//! Numerical policy shared by every module.

use serde::{Deserialize, Serialize};

use crate::analytic::DiscDomain;
use crate::error::{RenormError, Result};

/// Golden mean rotation number `(sqrt(5) - 1) / 2`.
pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// All tunable numerical parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenormConfig {
    /// Width of the enlarged interval `[-1-delta, 1+delta]`.
    pub delta: f64,
    /// Complex disc on which analytic maps are represented.
    pub disc: DiscDomain,
    /// Taylor truncation degree in `x`.
    pub n_x: usize,
    /// Fourier truncation in `theta`.
    pub k_theta: usize,
    /// Sampling nodes on the refit circle.
    pub m_nodes: usize,
    pub tol_newton: f64,
    pub tol_residual: f64,
    pub tol_degenerate: f64,
    /// Lyapunov threshold for attracting curves.
    pub k0: f64,
    /// Rotation number.
    pub omega: f64,
}

impl Default for RenormConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            disc: DiscDomain::default(),
            n_x: 40,
            k_theta: 8,
            m_nodes: 256,
            tol_newton: 1e-12,
            tol_residual: 1e-10,
            tol_degenerate: 1e-8,
            k0: 1e-3,
            omega: golden_mean(),
        }
    }
}

impl RenormConfig {
    pub fn with_n_x(mut self, n_x: usize) -> Self {
        self.n_x = n_x;
        self.m_nodes = self.m_nodes.max((4 * n_x + 8).next_power_of_two());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(RenormError::Config(msg));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.disc.radius > 0.0) {
            return fail(format!("disc radius must be positive, got {}", self.disc.radius));
        }
        let edge = 1.0 + self.delta;
        if (self.disc.center - edge).abs() > self.disc.radius
            || (self.disc.center + edge).abs() > self.disc.radius
        {
            return fail(format!(
                "disc {:?} does not contain [-{edge}, {edge}]",
                self.disc
            ));
        }
        if self.n_x < 4 {
            return fail(format!("n_x must be >= 4, got {}", self.n_x));
        }
        if self.m_nodes < 2 * self.n_x + 1 {
            return fail(format!(
                "m_nodes must be >= 2 n_x + 1 = {}, got {}",
                2 * self.n_x + 1,
                self.m_nodes
            ));
        }
        if self.k_theta == 0 {
            return fail("k_theta must be positive".into());
        }
        for (name, v) in [
            ("tol_newton", self.tol_newton),
            ("tol_residual", self.tol_residual),
            ("tol_degenerate", self.tol_degenerate),
            ("k0", self.k0),
        ] {
            if !(v > 0.0) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.omega) {
            return fail(format!("omega must lie in [0, 1), got {}", self.omega));
        }
        Ok(())
    }

    /// The enlarged interval `I_delta` as `(lo, hi)`.
    pub fn interval(&self) -> (f64, f64) {
        (-1.0 - self.delta, 1.0 + self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        RenormConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RenormConfig::default();
        cfg.n_x = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = RenormConfig::default();
        cfg.m_nodes = 10;
        assert!(cfg.validate().is_err());
        let mut cfg = RenormConfig::default();
        cfg.tol_newton = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RenormConfig::default();
        cfg.disc = DiscDomain::new(0.2, 0.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = RenormConfig::default().with_n_x(60);
        let s = serde_json::to_string(&cfg).unwrap();
        let back: RenormConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
    }
}
