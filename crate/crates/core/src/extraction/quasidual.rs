use num_complex::Complex64;

use super::study::{ErrorModel, Extractor, ModelTerm};
use super::{form_j, CouplingMatrix, FieldOnCircle, LambdaEstimate};
use crate::error::{invalid, Result};
use crate::singular_functions::{DomainConfig, SingularSeries};

/// Quasi-dual functions `K^{k,p}_m` for one parity plus the couplings between them.
#[derive(Clone, Debug)]
pub struct QuasiDualSetup {
    pub config: DomainConfig,
    pub p: u8,
    pub k_max: i32,
    pub m: usize,
    duals: Vec<SingularSeries>,
    pub coupling: CouplingMatrix,
}

impl QuasiDualSetup {
    pub fn new(config: DomainConfig, p: u8, k_max: i32, m: usize) -> Result<Self> {
        if p > 1 {
            return invalid(format!("p must be 0 or 1, got {p}"));
        }
        if 2 * m as i32 + 2 <= k_max {
            return invalid(format!(
                "quasi-dual order m = {m} too low for k = {k_max} (need 2m + 2 > k)"
            ));
        }
        let k_min = i32::from(p);
        if k_max < k_min {
            return invalid(format!("k_max = {k_max} below the smallest k for p = {p}"));
        }
        // Depth max(m, k/2) so every coupling table is available.
        let duals = (k_min..=k_max)
            .map(|k| SingularSeries::dual(k, p, m, &config))
            .collect::<Result<Vec<_>>>()?;
        let coupling = CouplingMatrix::build(&config, p, k_max)?;
        Ok(QuasiDualSetup {
            config,
            p,
            k_max,
            m,
            duals,
            coupling,
        })
    }

    pub fn ks(&self) -> impl Iterator<Item = i32> + '_ {
        self.duals.iter().map(SingularSeries::k)
    }

    /// Solves the lower-triangular system of circle functionals at one radius.
    pub fn extract_at(&self, a: &dyn FieldOnCircle) -> Result<Vec<LambdaEstimate>> {
        let r = a.radius();
        let mut out: Vec<LambdaEstimate> = Vec::with_capacity(self.duals.len());
        for dual in &self.duals {
            let k = dual.k();
            let j = form_j(dual, a)?;
            let mut correction = Complex64::default();
            let mut magnitude = j.magnitude;
            for ell in 1..=(k / 2) as usize {
                let lower = k - 2 * ell as i32;
                let Some(prev) = out.iter().find(|e| e.k == lower) else {
                    continue;
                };
                let c = self.coupling.get(k, ell);
                correction += c * prev.lambda;
                magnitude += c.norm() * prev.magnitude;
            }
            out.push(LambdaEstimate {
                k,
                p: self.p,
                r,
                raw: j.value,
                correction,
                lambda: j.value - correction,
                magnitude,
            });
        }
        Ok(out)
    }
}

impl Extractor for QuasiDualSetup {
    fn label(&self) -> String {
        format!("quasi-dual m={}", self.m)
    }

    fn zeta(&self) -> f64 {
        self.config.zeta
    }

    fn estimate(&self, a: &dyn FieldOnCircle) -> Result<Vec<LambdaEstimate>> {
        self.extract_at(a)
    }

    /// `R^{-k} R0^{2m+2} log R`, one power of R better for p = 1, no log for odd k.
    fn model(&self, k: i32, p: u8) -> ErrorModel {
        ErrorModel {
            terms: vec![ModelTerm {
                r_power: -k + i32::from(p),
                r0_power: 2 * self.m as u32 + 2,
                log: k % 2 == 0,
            }],
        }
    }

    fn corrected(&self, k: i32) -> bool {
        k >= 2
    }
}
