use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{RenormError, Result};

/// Closed disc `|z - center| <= radius` with a real center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscDomain {
    pub center: f64,
    pub radius: f64,
}

impl Default for DiscDomain {
    /// The disc centered at 1/5 with radius 3/2.
    fn default() -> Self {
        Self {
            center: 0.2,
            radius: 1.5,
        }
    }
}

const BOUNDARY_SLACK: f64 = 1e-9;

impl DiscDomain {
    pub fn new(center: f64, radius: f64) -> Self {
        assert!(radius > 0.0, "disc radius must be positive");
        Self { center, radius }
    }

    /// Smallest disc centered at the origin that contains `self`.
    pub fn origin_hull(&self) -> Self {
        Self::new(0.0, self.center.abs() + self.radius)
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.distance(z) <= self.radius * (1.0 + BOUNDARY_SLACK)
    }

    pub fn check(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(RenormError::DomainEscape {
                re: z.re,
                im: z.im,
                center: self.center,
                radius: self.radius,
            })
        }
    }

    /// Same check, reported as an image escape of a composition.
    pub fn check_image(&self, z: Complex64) -> Result<()> {
        let distance = self.distance(z);
        if distance <= self.radius * (1.0 + BOUNDARY_SLACK) && distance.is_finite() {
            Ok(())
        } else {
            Err(RenormError::ImageEscape {
                distance,
                radius: self.radius,
            })
        }
    }

    /// `count` equispaced points on the circle of radius `fraction * radius`.
    pub fn circle(&self, fraction: f64, count: usize) -> Vec<Complex64> {
        let rho = fraction * self.radius;
        (0..count)
            .map(|j| {
                let phi = std::f64::consts::TAU * j as f64 / count as f64;
                Complex64::new(self.center, 0.0) + Complex64::from_polar(rho, phi)
            })
            .collect()
    }
}
