//! Circle functionals and singular-coefficient extraction.

mod coupling;
mod manufactured;
mod moments;
mod quasidual;
mod study;

pub use coupling::{
    coupling_between, coupling_coefficient, coupling_from_tables, CouplingEntry, CouplingMatrix,
};
pub use manufactured::{ManufacturedCircle, ManufacturedField};
pub use moments::{moment, MomentCoefficients, MomentSetup, MomentVariant};
pub use quasidual::QuasiDualSetup;
pub use study::{
    convergence_study, fit_slope, geometric_grid, r0, ErrorModel, ExtractionReport, Extractor,
    ModelTerm, Reference, SlopeFit, SweepRow, SweepSeries, MIN_FIT_POINTS,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_period_abs, DEFAULT_TOL};
use crate::singular_functions::SingularSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Manufactured,
    Solved,
    Series,
}

/// Trace of a field and of its radial derivative on the circle `r = R`.
pub trait FieldOnCircle: Send + Sync {
    fn radius(&self) -> f64;
    fn value(&self, theta: f64) -> Result<Complex64>;
    fn radial_derivative(&self, theta: f64) -> Result<Complex64>;
    fn provenance(&self) -> Provenance;
    /// Angles where the trace is only piecewise smooth, besides the seams.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A field that can be traced on any circle in its range.
pub trait CircleFamily: Send + Sync {
    fn circle(&self, r: f64) -> Result<Box<dyn FieldOnCircle + '_>>;
    fn provenance(&self) -> Provenance;
}

/// A singular series traced on a circle.
pub struct SeriesCircle<'a> {
    pub series: &'a SingularSeries,
    pub r: f64,
}

impl FieldOnCircle for SeriesCircle<'_> {
    fn radius(&self) -> f64 {
        self.r
    }
    fn value(&self, theta: f64) -> Result<Complex64> {
        self.series.eval(self.r, theta)
    }
    fn radial_derivative(&self, theta: f64) -> Result<Complex64> {
        self.series.eval_dr(self.r, theta)
    }
    fn provenance(&self) -> Provenance {
        Provenance::Series
    }
}

impl CircleFamily for SingularSeries {
    fn circle(&self, r: f64) -> Result<Box<dyn FieldOnCircle + '_>> {
        Ok(Box::new(SeriesCircle { series: self, r }))
    }
    fn provenance(&self) -> Provenance {
        Provenance::Series
    }
}

fn breaks(a: &dyn FieldOnCircle, omega: f64) -> Vec<f64> {
    let mut b = vec![0.5 * omega, -0.5 * omega];
    b.extend(a.breakpoints());
    b
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Invalid(format!(
            "circle radius must be positive, got {r}"
        )));
    }
    Ok(())
}

/// A functional value with the size of its integrand, `int |f|`, for noise estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub value: Complex64,
    pub magnitude: f64,
}

/// `M_R(K, A) = int_0^{2pi} K A dtheta`.
pub fn form_m<K>(kernel: K, a: &dyn FieldOnCircle, omega: f64) -> Result<Functional>
where
    K: Fn(f64) -> Result<Complex64>,
{
    check_radius(a.radius())?;
    let (value, magnitude) = integrate_period_abs(
        |t| Ok(kernel(t)? * a.value(t)?),
        -0.5 * omega,
        &breaks(a, omega),
        DEFAULT_TOL,
    )?;
    Ok(Functional { value, magnitude })
}

/// `J_R(K, A) = int (K dr A - A dr K) R dtheta`.
pub fn form_j(k: &SingularSeries, a: &dyn FieldOnCircle) -> Result<Functional> {
    let r = a.radius();
    check_radius(r)?;
    let omega = k.omega();
    let b = breaks(a, omega);
    let start = -0.5 * omega;
    let (i1, m1) = integrate_period_abs(
        |t| Ok(k.eval(r, t)? * a.radial_derivative(t)? * r),
        start,
        &b,
        DEFAULT_TOL,
    )?;
    let (i2, m2) = integrate_period_abs(
        |t| Ok(a.value(t)? * k.eval_dr(r, t)? * r),
        start,
        &b,
        DEFAULT_TOL,
    )?;
    Ok(Functional {
        value: i1 - i2,
        magnitude: m1 + m2,
    })
}

/// One coefficient estimate at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub k: i32,
    pub p: u8,
    pub r: f64,
    /// The circle functional before corrections (J, or the moment M).
    pub raw: Complex64,
    /// Amount subtracted from or divided into `raw`, expressed as `raw - lambda`.
    pub correction: Complex64,
    pub lambda: Complex64,
    /// Rounding-scale size of the computation (`int |integrand|`).
    pub magnitude: f64,
}
