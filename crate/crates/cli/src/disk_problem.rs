//! The disk test problem: conductor of opening pi/4 in a 50 mm disk, rim data `|theta| / (2 pi)`.

use std::f64::consts::{PI, SQRT_2};

use eddycorner_core::extraction::{CircleFamily, QuasiDualSetup, Reference, SweepSeries};
use eddycorner_core::singular_functions::DomainConfig;
use eddycorner_core::Result;
use eddycorner_solver::{solve_disk, PolarField, PolarGrid};
use num_complex::Complex64;
use serde::Serialize;

pub const OMEGA: f64 = PI / 4.0;
pub const R_DOMAIN: f64 = 0.05;
pub const R_SMALL: f64 = 5e-5;
/// Innermost ring relative to the domain radius.
pub const R_MIN_REL: f64 = 1e-7;
pub const GRID: usize = 512;

/// `1 / (5 sqrt 2)` per millimetre, in 1/m.
pub fn zeta() -> f64 {
    1e3 / (5.0 * SQRT_2)
}

pub const CENTER: Complex64 = Complex64::new(0.114449904, -0.0464907336);
/// `J_{R_small}(K^{k,0}_1, A)` for k = 1, 2, 3.
pub const FUNCTIONALS: [Complex64; 3] = [
    Complex64::new(-12.970664, -5.40915055),
    Complex64::new(1406.54919, 4599.19999),
    Complex64::new(93037.6253, -154720.669),
];

pub fn solve(
    cfg: &DomainConfig,
    r_domain: f64,
    n_r: usize,
    n_theta: usize,
    r_min_rel: f64,
) -> Result<PolarField> {
    solve_disk(
        cfg,
        PolarGrid::spanning(cfg.omega, r_domain, r_min_rel * r_domain, n_r, n_theta)?,
    )
}

/// Values at the corner and at `R_small` that serve as references for the sweeps.
#[derive(Clone, Debug, Serialize)]
pub struct References {
    pub r_small: f64,
    pub center: Complex64,
    /// `(k, J_{R_small}(K^{k,0}_1, A), Lambda^{k,0})`, the latter after the coupling corrections.
    pub functionals: Vec<(i32, Complex64, Complex64)>,
}

impl References {
    pub fn compute(field: &PolarField, cfg: &DomainConfig, r_small: f64) -> Result<Self> {
        let setup = QuasiDualSetup::new(*cfg, 0, 3, 1)?;
        let est = setup.extract_at(field.circle(r_small)?.as_ref())?;
        Ok(References {
            r_small,
            center: field.center,
            functionals: est.iter().map(|e| (e.k, e.raw, e.lambda)).collect(),
        })
    }

    pub fn lambda(&self, k: i32) -> Option<Complex64> {
        self.functionals.iter().find(|f| f.0 == k).map(|f| f.2)
    }

    pub fn raw(&self, k: i32) -> Option<Complex64> {
        self.functionals.iter().find(|f| f.0 == k).map(|f| f.1)
    }

    /// The corner value for `Lambda^{0,0}`, the order-one quasi-dual estimate at `R_small` otherwise.
    pub fn reference(&self) -> Reference {
        Reference::Known(
            self.functionals
                .iter()
                .map(|&(k, _, l)| (k, 0, if k == 0 { self.center } else { l }))
                .collect(),
        )
    }
}

/// Log-log slope of error over model across the rows with `zeta R` in `[lo, hi]`.
pub fn regime_slope(series: &SweepSeries, zeta: f64, lo: f64, hi: f64) -> Option<(f64, usize)> {
    let pts: Vec<(f64, f64)> = series
        .rows
        .iter()
        .filter(|r| (lo..=hi).contains(&(zeta * r.r)) && r.err_abs > 0.0)
        .map(|r| (r.r.ln(), (r.err_abs / r.model).ln()))
        .collect();
    (pts.len() >= 4).then(|| (least_squares_slope(&pts), pts.len()))
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
