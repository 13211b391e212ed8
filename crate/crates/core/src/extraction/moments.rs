use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::study::{ErrorModel, Extractor, ModelTerm};
use super::{form_m, FieldOnCircle, LambdaEstimate};
use crate::error::{invalid, Result};
use crate::quadrature::{integrate_period, DEFAULT_TOL};
use crate::shadow_engine::{build_chain, ChainKind};
use crate::singular_functions::{angular_decompose, AngularFunction, DomainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentVariant {
    /// Leading term of `S^{0,0}` (and of `S^{1,1}`) only.
    N1OneTerm,
    /// Two terms of `S^{0,0}` (and of `S^{1,1}`).
    N1TwoTerms,
    /// Two-by-two even system with two terms of `S^{0,0}` and one of `S^{1,0}`.
    N3,
    /// Two-by-two even system with one term of each: diagonal, uncorrected.
    N3Diagonal,
}

/// `M^{0,0}_R = (1/2pi) int A`, `M^{k,p}_R = 2k M_R(k^{k,p}_0, A) = (R^-k / pi) int cos(k theta - p pi/2) A`.
pub fn moment(k: i32, p: u8, a: &dyn FieldOnCircle, omega: f64) -> Result<(Complex64, f64)> {
    let r = a.radius();
    if k == 0 {
        if p != 0 {
            return invalid("no moment for k = 0, p = 1");
        }
        let f = form_m(|_| Ok(Complex64::new(1.0, 0.0)), a, omega)?;
        return Ok((f.value / (2.0 * PI), f.magnitude / (2.0 * PI)));
    }
    let shift = f64::from(p) * 0.5 * PI;
    let kf = f64::from(k);
    let f = form_m(
        |t| Ok(Complex64::new((kf * t - shift).cos(), 0.0)),
        a,
        omega,
    )?;
    let scale = r.powi(-k) / PI;
    Ok((f.value * scale, f.magnitude * scale))
}

/// Angular moments of the first shadows, index q = power of `log R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCoefficients {
    /// `(1/2pi) int Phi^{0,0}_{1,q}`.
    pub m00: [f64; 2],
    /// `(1/pi) int cos(theta) Phi^{0,0}_{1,q}`.
    pub m10: [f64; 2],
    /// `(1/pi) int sin(theta) Phi^{1,1}_{1,q}`.
    pub m11: [f64; 2],
}

impl MomentCoefficients {
    pub fn compute(omega: f64) -> Result<Self> {
        let t00 = angular_decompose(&build_chain(0, ChainKind::Primal, 1, omega)?, 0)?;
        let t11 = angular_decompose(&build_chain(1, ChainKind::Primal, 1, omega)?, 1)?;
        let weighted = |f: &AngularFunction, w: &dyn Fn(f64) -> f64| -> Result<f64> {
            Ok(integrate_period(
                |t| Ok(Complex64::new(w(t) * f.eval(t), 0.0)),
                -0.5 * omega,
                &[0.5 * omega],
                DEFAULT_TOL,
            )?
            .re)
        };
        let mut c = MomentCoefficients {
            m00: [0.0; 2],
            m10: [0.0; 2],
            m11: [0.0; 2],
        };
        for q in 0..2 {
            let phi00 = t00.get(1, q)?;
            let phi11 = t11.get(1, q)?;
            c.m00[q] = weighted(&phi00, &|_| 1.0)? / (2.0 * PI);
            c.m10[q] = weighted(&phi00, &|t: f64| t.cos())? / PI;
            c.m11[q] = weighted(&phi11, &|t: f64| t.sin())? / PI;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug)]
pub struct MomentSetup {
    pub config: DomainConfig,
    pub variant: MomentVariant,
    pub coefficients: MomentCoefficients,
}

impl MomentSetup {
    pub fn new(config: DomainConfig, variant: MomentVariant) -> Result<Self> {
        Ok(MomentSetup {
            config,
            variant,
            coefficients: MomentCoefficients::compute(config.omega)?,
        })
    }

    /// `i (zeta R)^2 sum_q m_q log^q R`.
    fn shadow_factor(&self, m: [f64; 2], r: f64) -> Complex64 {
        let z = self.config.zeta * r;
        Complex64::new(0.0, z * z) * (m[0] + m[1] * r.ln())
    }

    pub fn extract_at(&self, a: &dyn FieldOnCircle) -> Result<Vec<LambdaEstimate>> {
        let r = a.radius();
        if r > 1.0 {
            return invalid(format!("the moment method assumes R <= 1, got {r}"));
        }
        let omega = self.config.omega;
        let c = &self.coefficients;
        let (m00, g00) = moment(0, 0, a, omega)?;
        let (m11, g11) = moment(1, 1, a, omega)?;
        let est = |k, p, raw: Complex64, lambda: Complex64, magnitude| LambdaEstimate {
            k,
            p,
            r,
            raw,
            correction: raw - lambda,
            lambda,
            magnitude,
        };
        let two_terms =
            self.variant != MomentVariant::N1OneTerm && self.variant != MomentVariant::N3Diagonal;
        let d00 = 1.0 + self.shadow_factor(c.m00, r);
        let l00 = if two_terms { m00 / d00 } else { m00 };
        let l11 = if two_terms {
            m11 / (1.0 + self.shadow_factor(c.m11, r))
        } else {
            m11
        };
        let mut out = vec![est(0, 0, m00, l00, g00)];
        match self.variant {
            MomentVariant::N1OneTerm | MomentVariant::N1TwoTerms => {}
            MomentVariant::N3Diagonal => {
                let (m10, g10) = moment(1, 0, a, omega)?;
                out.push(est(1, 0, m10, m10, g10));
            }
            MomentVariant::N3 => {
                let (m10, g10) = moment(1, 0, a, omega)?;
                let cross = self.shadow_factor(c.m10, r) / r;
                out.push(est(
                    1,
                    0,
                    m10,
                    m10 - m00 * cross / d00,
                    g10 + g00 * cross.norm(),
                ));
            }
        }
        out.push(est(1, 1, m11, l11, g11));
        Ok(out)
    }
}

impl Extractor for MomentSetup {
    fn label(&self) -> String {
        format!("moments {:?}", self.variant)
    }

    fn zeta(&self) -> f64 {
        self.config.zeta
    }

    fn estimate(&self, a: &dyn FieldOnCircle) -> Result<Vec<LambdaEstimate>> {
        self.extract_at(a)
    }

    fn model(&self, k: i32, p: u8) -> ErrorModel {
        let t = |r_power, r0_power| ModelTerm {
            r_power,
            r0_power,
            log: false,
        };
        let one_term = matches!(
            self.variant,
            MomentVariant::N1OneTerm | MomentVariant::N3Diagonal
        );
        let terms = match (k, p) {
            (1, 0) if one_term => vec![t(-1, 2)],
            // One term of S^{1,0} leaves its own shadow, of order R0^2, in M^{1,0}.
            (1, 0) => vec![t(0, 2), t(1, 2), t(-1, 4)],
            _ if one_term => vec![t(0, 2)],
            _ => vec![t(1, 2), t(0, 4)],
        };
        ErrorModel { terms }
    }

    fn corrected(&self, _k: i32) -> bool {
        !matches!(
            self.variant,
            MomentVariant::N1OneTerm | MomentVariant::N3Diagonal
        )
    }
}
