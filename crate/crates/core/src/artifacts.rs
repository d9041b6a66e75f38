//! The `fixed_point.json` artifact shared by the spectral and slope stages.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::analytic::AnalyticMap1D;
use crate::config::RenormConfig;
use crate::error::{RenormError, Result};
use crate::qprenorm::{check_h0, H0Report};
use crate::renorm1d::{dr_spectrum, FixedPointResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointArtifact {
    pub phi: AnalyticMap1D,
    pub a: f64,
    pub residual: f64,
    pub n_x: usize,
    pub delta: f64,
    pub iterations: usize,
    /// Leading eigenvalue of `DR(phi)`.
    pub feigenbaum_delta: f64,
}

impl FixedPointArtifact {
    pub fn new(fp: &FixedPointResult, cfg: &RenormConfig) -> Result<Self> {
        let spectrum = dr_spectrum(&fp.phi, cfg)?;
        Ok(Self {
            phi: fp.phi.clone(),
            a: fp.a,
            residual: fp.residual,
            n_x: fp.phi.degree(),
            delta: cfg.delta,
            iterations: fp.iterations,
            feigenbaum_delta: spectrum.first().map_or(f64::NAN, |z| z.re),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| RenormError::Artifact(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let art: Self =
            serde_json::from_str(text).map_err(|e| RenormError::Artifact(e.to_string()))?;
        art.validate()?;
        Ok(art)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")
            .map_err(|e| RenormError::Artifact(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RenormError::Artifact(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks: declared degree, `a` in `(-1, 0)`, `a = phi(1)`.
    pub fn validate(&self) -> Result<()> {
        if self.phi.degree() != self.n_x {
            return Err(RenormError::Artifact(format!(
                "phi has degree {} but n_x = {}",
                self.phi.degree(),
                self.n_x
            )));
        }
        if !(self.a > -1.0 && self.a < 0.0) {
            return Err(RenormError::Artifact(format!("a = {} outside (-1, 0)", self.a)));
        }
        let a = self.phi.eval_real(1.0)?;
        if (a - self.a).abs() > 1e-12 {
            return Err(RenormError::Artifact(format!("phi(1) = {a} but a = {}", self.a)));
        }
        Ok(())
    }

    /// The analyticity-domain condition required before using `phi` as the
    /// base point of quasi-periodic renormalization.
    pub fn check_h0(&self) -> Result<H0Report> {
        check_h0(&self.phi)
    }
}
