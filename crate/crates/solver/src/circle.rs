use eddycorner_core::extraction::{FieldOnCircle, Provenance};
use eddycorner_core::{Error, Result};
use num_complex::Complex64;

use crate::grid::PolarGrid;
use crate::solve::PolarField;

/// Trace of a grid field on a circle: five-point Lagrange in `log r` for the value and
/// radial derivative of every grid column, then cubics in theta that never reach
/// across a seam.
pub struct GridCircle {
    grid: PolarGrid,
    r: f64,
    value: Vec<Complex64>,
    dr: Vec<Complex64>,
}

/// Lagrange weights and derivative weights at `x` for nodes `xs`.
fn lagrange(xs: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = xs.len();
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    for k in 0..n {
        let mut prod = 1.0;
        let mut denom = 1.0;
        for m in 0..n {
            if m != k {
                prod *= x - xs[m];
                denom *= xs[k] - xs[m];
            }
        }
        w[k] = prod / denom;
        let mut d = 0.0;
        for l in 0..n {
            if l == k {
                continue;
            }
            let mut p = 1.0;
            for m in 0..n {
                if m != k && m != l {
                    p *= x - xs[m];
                }
            }
            d += p;
        }
        dw[k] = d / denom;
    }
    (w, dw)
}

impl GridCircle {
    pub fn new(field: &PolarField, r: f64) -> Result<Self> {
        let g = field.grid;
        let h = g.h();
        // Position in ring units.
        let x = (r / g.r_domain).ln() / h + g.n_r as f64;
        if !(x >= 2.0 && x <= g.n_r as f64 - 2.0) {
            return Err(Error::Invalid(format!(
                "circle radius {r} outside the interpolation range [{:.3e}, {:.3e}]",
                g.r(2),
                g.r(g.n_r - 2)
            )));
        }
        let i0 = (x.floor() as usize).clamp(2, g.n_r - 2) - 2;
        let nodes: Vec<f64> = (0..5).map(|k| (i0 + k) as f64).collect();
        let (w, dw) = lagrange(&nodes, x);
        let mut value = vec![Complex64::default(); g.n_theta];
        let mut dr = vec![Complex64::default(); g.n_theta];
        for j in 0..g.n_theta {
            for k in 0..5 {
                let v = field.at(i0 + k, j);
                value[j] += w[k] * v;
                dr[j] += dw[k] * v;
            }
            // d/dr = (1 / r) d/ds, and one ring unit is h in s.
            dr[j] /= h * r;
        }
        Ok(GridCircle {
            grid: g,
            r,
            value,
            dr,
        })
    }

    /// First of four consecutive grid indices, and theta's offset from it in cells.
    fn stencil(&self, theta: f64) -> (isize, f64) {
        let g = &self.grid;
        let nt = g.n_theta as isize;
        let u = (theta + std::f64::consts::PI) / g.dtheta();
        let j = u.floor() as isize;
        let seams = g.seams().map(|s| s as isize);
        let is_seam = |k: isize| seams.contains(&k.rem_euclid(nt));
        // Interval [j, j + 1]: centered stencil unless a seam lies strictly inside it.
        let start = if is_seam(j + 1) {
            j - 2
        } else if is_seam(j) {
            j
        } else {
            j - 1
        };
        (start, u - start as f64)
    }

    fn interp(&self, data: &[Complex64], theta: f64) -> Complex64 {
        let nt = self.grid.n_theta as isize;
        let t = eddycorner_core::term_algebra::normalize_angle(theta);
        let (start, x) = self.stencil(t);
        let (w, _) = lagrange(&[0.0, 1.0, 2.0, 3.0], x);
        (0..4)
            .map(|k| w[k] * data[(start + k as isize).rem_euclid(nt) as usize])
            .sum()
    }
}

impl FieldOnCircle for GridCircle {
    fn radius(&self) -> f64 {
        self.r
    }
    fn value(&self, theta: f64) -> Result<Complex64> {
        Ok(self.interp(&self.value, theta))
    }
    fn radial_derivative(&self, theta: f64) -> Result<Complex64> {
        Ok(self.interp(&self.dr, theta))
    }
    fn provenance(&self) -> Provenance {
        Provenance::Solved
    }
    fn breakpoints(&self) -> Vec<f64> {
        (0..self.grid.n_theta).map(|j| self.grid.theta(j)).collect()
    }
}

impl eddycorner_core::extraction::CircleFamily for PolarField {
    fn circle(&self, r: f64) -> Result<Box<dyn FieldOnCircle + '_>> {
        Ok(Box::new(GridCircle::new(self, r)?))
    }
    fn provenance(&self) -> Provenance {
        Provenance::Solved
    }
}
