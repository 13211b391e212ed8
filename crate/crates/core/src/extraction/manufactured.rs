use num_complex::Complex64;

use super::{CircleFamily, FieldOnCircle, Provenance};
use crate::error::Result;
use crate::singular_functions::{DomainConfig, SingularSeries};

/// `A = sum Lambda^{k,p} S^{k,p}_order` with prescribed coefficients.
#[derive(Clone, Debug)]
pub struct ManufacturedField {
    pub config: DomainConfig,
    pub order: usize,
    terms: Vec<(Complex64, SingularSeries)>,
}

impl ManufacturedField {
    pub fn new(
        config: DomainConfig,
        order: usize,
        coefficients: &[(i32, u8, Complex64)],
    ) -> Result<Self> {
        let terms = coefficients
            .iter()
            .map(|&(k, p, c)| Ok((c, SingularSeries::primal(k, p, order, &config)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ManufacturedField {
            config,
            order,
            terms,
        })
    }

    /// Prescribed `Lambda^{k,p}`, zero when absent.
    pub fn coefficient(&self, k: i32, p: u8) -> Complex64 {
        self.terms
            .iter()
            .filter(|(_, s)| s.k() == k && s.p() == p)
            .map(|(c, _)| *c)
            .sum()
    }

    pub fn eval(&self, r: f64, theta: f64) -> Result<Complex64> {
        self.terms
            .iter()
            .map(|(c, s)| Ok(c * s.eval(r, theta)?))
            .sum()
    }

    pub fn eval_dr(&self, r: f64, theta: f64) -> Result<Complex64> {
        self.terms
            .iter()
            .map(|(c, s)| Ok(c * s.eval_dr(r, theta)?))
            .sum()
    }
}

pub struct ManufacturedCircle<'a> {
    field: &'a ManufacturedField,
    r: f64,
}

impl FieldOnCircle for ManufacturedCircle<'_> {
    fn radius(&self) -> f64 {
        self.r
    }
    fn value(&self, theta: f64) -> Result<Complex64> {
        self.field.eval(self.r, theta)
    }
    fn radial_derivative(&self, theta: f64) -> Result<Complex64> {
        self.field.eval_dr(self.r, theta)
    }
    fn provenance(&self) -> Provenance {
        Provenance::Manufactured
    }
}

impl CircleFamily for ManufacturedField {
    fn circle(&self, r: f64) -> Result<Box<dyn FieldOnCircle + '_>> {
        Ok(Box::new(ManufacturedCircle { field: self, r }))
    }
    fn provenance(&self) -> Provenance {
        Provenance::Manufactured
    }
}
