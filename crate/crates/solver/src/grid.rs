use std::f64::consts::PI;

use eddycorner_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Log-polar grid: rings at `r_i = r_domain * ratio^(i - n_r)`, i = 0..=n_r (the last one
/// is the rim), and `n_theta` uniform angles `theta_j = -pi + j dtheta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub omega: f64,
    pub r_domain: f64,
    pub ratio: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(omega: f64, r_domain: f64, ratio: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_domain > 0.0 && r_domain.is_finite()) {
            return Err(Error::Invalid(format!(
                "domain radius must be positive, got {r_domain}"
            )));
        }
        if !(ratio > 1.0 && ratio < 2.0) {
            return Err(Error::Invalid(format!(
                "radial ratio must lie in (1, 2), got {ratio}"
            )));
        }
        if n_r < 8 || n_theta < 8 {
            return Err(Error::Invalid(format!(
                "grid {n_r} x {n_theta} is too coarse"
            )));
        }
        let g = PolarGrid {
            omega,
            r_domain,
            ratio,
            n_r,
            n_theta,
        };
        let q = 0.5 * omega / g.dtheta();
        if (q - q.round()).abs() > 1e-9 || q.round() < 2.0 || q.round() as usize + 2 > n_theta / 2 {
            return Err(Error::Invalid(format!(
                "omega / 2 = {} is not a grid angle of a {n_theta}-point circle away from theta = 0 and pi",
                0.5 * omega
            )));
        }
        Ok(g)
    }

    /// Grid with ratio chosen so that the innermost ring sits at `r_min`.
    pub fn spanning(
        omega: f64,
        r_domain: f64,
        r_min: f64,
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_domain) {
            return Err(Error::Invalid(format!(
                "inner radius {r_min} outside (0, {r_domain})"
            )));
        }
        Self::new(
            omega,
            r_domain,
            (r_domain / r_min).powf(1.0 / n_r as f64),
            n_r,
            n_theta,
        )
    }

    pub fn h(&self) -> f64 {
        self.ratio.ln()
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_domain * self.ratio.powi(i as i32 - self.n_r as i32)
    }

    pub fn theta(&self, j: usize) -> f64 {
        -PI + j as f64 * self.dtheta()
    }

    /// Index of the seam `+omega/2` (the other one is mirrored).
    pub fn seam_index(&self) -> usize {
        (0.5 * self.omega / self.dtheta()).round() as usize + self.n_theta / 2
    }

    pub fn seams(&self) -> [usize; 2] {
        let s = self.seam_index();
        [s, self.n_theta - s]
    }

    /// Conductor indicator at a node: 1 inside, 1/2 on the seams, 0 outside.
    pub fn chi(&self, j: usize) -> f64 {
        let seams = self.seams();
        if seams.contains(&j) {
            0.5
        } else if j > seams[1] && j < seams[0] {
            1.0
        } else {
            0.0
        }
    }

    pub fn unknowns(&self) -> usize {
        self.n_r * self.n_theta + 1
    }
}
