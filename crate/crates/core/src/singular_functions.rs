//! Truncated primal and dual singular series and their angular decompositions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::shadow_engine::{build_chain, validate_omega, ChainKind, SectorPair, ShadowChain};
use crate::term_algebra::{normalize_angle, sector_angle, AngularPiece, Sector};

/// Tolerance for the value and slope jumps of angular functions at the seams.
pub const SEAM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalInputs {
    pub kappa: f64,
    pub mu0: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub omega: f64,
    /// Inverse length (1/m).
    pub zeta: f64,
    pub physical: Option<PhysicalInputs>,
}

impl DomainConfig {
    pub fn new(omega: f64, zeta: f64) -> Result<Self> {
        validate_omega(omega)?;
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return invalid(format!("zeta must be finite and >= 0, got {zeta}"));
        }
        Ok(DomainConfig {
            omega,
            zeta,
            physical: None,
        })
    }

    /// `zeta^2 = kappa mu0 sigma / 4`.
    pub fn from_physical(omega: f64, phys: PhysicalInputs) -> Result<Self> {
        let z2 = phys.kappa * phys.mu0 * phys.sigma / 4.0;
        if !(z2 >= 0.0 && z2.is_finite()) {
            return invalid("kappa mu0 sigma must be finite and >= 0");
        }
        let mut cfg = DomainConfig::new(omega, z2.sqrt())?;
        cfg.physical = Some(phys);
        Ok(cfg)
    }

    /// `i zeta^2`, the expansion parameter of all series.
    pub fn i_zeta2(&self) -> Complex64 {
        Complex64::new(0.0, self.zeta * self.zeta)
    }
}

/// Real part selector applied to complex shadows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
    NegIm,
}

impl Part {
    pub fn apply(self, c: Complex64) -> f64 {
        match self {
            Part::Re => c.re,
            Part::Im => c.im,
            Part::NegIm => -c.im,
        }
    }

    pub fn select(kind: ChainKind, p: u8) -> Part {
        match (kind, p) {
            (_, 0) => Part::Re,
            (ChainKind::Primal, _) => Part::Im,
            (ChainKind::Dual, _) => Part::NegIm,
        }
    }
}

/// `S^{k,p}_m` or `K^{k,p}_m`: `sum_{j<=m} (i zeta^2)^j part(u_j)`.
#[derive(Clone, Debug)]
pub struct SingularSeries {
    chain: ShadowChain,
    radial: Vec<SectorPair>,
    p: u8,
    m: usize,
    zeta: f64,
}

impl SingularSeries {
    pub fn new(chain: ShadowChain, p: u8, m: usize, zeta: f64) -> Result<Self> {
        if p > 1 {
            return invalid(format!("p must be 0 or 1, got {p}"));
        }
        if chain.k == 0 && p == 1 {
            return invalid("k = 0, p = 1 is not a supported singular function");
        }
        if chain.depth() < m {
            return invalid(format!(
                "chain depth {} below truncation order {m}",
                chain.depth()
            ));
        }
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return invalid(format!("zeta must be finite and >= 0, got {zeta}"));
        }
        let radial = chain.pairs[..=m].iter().map(SectorPair::euler).collect();
        Ok(SingularSeries {
            chain,
            radial,
            p,
            m,
            zeta,
        })
    }

    pub fn primal(k: i32, p: u8, m: usize, cfg: &DomainConfig) -> Result<Self> {
        SingularSeries::new(
            build_chain(k, ChainKind::Primal, m, cfg.omega)?,
            p,
            m,
            cfg.zeta,
        )
    }

    pub fn dual(k: i32, p: u8, m: usize, cfg: &DomainConfig) -> Result<Self> {
        SingularSeries::new(
            build_chain(k, ChainKind::Dual, m, cfg.omega)?,
            p,
            m,
            cfg.zeta,
        )
    }

    pub fn chain(&self) -> &ShadowChain {
        &self.chain
    }
    pub fn k(&self) -> i32 {
        self.chain.k
    }
    pub fn kind(&self) -> ChainKind {
        self.chain.kind
    }
    pub fn p(&self) -> u8 {
        self.p
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }
    pub fn omega(&self) -> f64 {
        self.chain.omega
    }
    pub fn part(&self) -> Part {
        Part::select(self.chain.kind, self.p)
    }

    fn check_r(r: f64) -> Result<()> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Singular(r));
        }
        Ok(())
    }

    fn sum(&self, pairs: &[SectorPair], r: f64, theta: f64) -> Result<Complex64> {
        let iz2 = Complex64::new(0.0, self.zeta * self.zeta);
        let part = self.part();
        let mut acc = Complex64::default();
        let mut w = Complex64::new(1.0, 0.0);
        for pair in &pairs[..=self.m] {
            acc += w * part.apply(pair.evaluate(r, theta, self.chain.omega)?);
            w *= iz2;
        }
        Ok(acc)
    }

    pub fn eval(&self, r: f64, theta: f64) -> Result<Complex64> {
        Self::check_r(r)?;
        self.sum(&self.chain.pairs, r, theta)
    }

    /// Radial derivative, from `r d/dr = z dz + zb dzb` applied term by term.
    pub fn eval_dr(&self, r: f64, theta: f64) -> Result<Complex64> {
        Self::check_r(r)?;
        Ok(self.sum(&self.radial, r, theta)? / r)
    }

    pub fn angular_table(&self) -> Result<AngularTable> {
        angular_decompose(&self.chain, self.p)
    }
}

/// Real angular function given by complex pieces in each sector's own argument.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularFunction {
    pub omega: f64,
    pub part: Part,
    pub minus: Vec<AngularPiece>,
    pub plus: Vec<AngularPiece>,
}

impl AngularFunction {
    pub fn zero(omega: f64) -> Self {
        AngularFunction {
            omega,
            part: Part::Re,
            minus: Vec::new(),
            plus: Vec::new(),
        }
    }

    fn locate(&self, theta: f64) -> (&[AngularPiece], f64) {
        let theta = normalize_angle(theta);
        if theta.abs() <= 0.5 * self.omega {
            (&self.minus, theta)
        } else {
            (&self.plus, sector_angle(Sector::Plus, theta))
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (pieces, phi) = self.locate(theta);
        self.part.apply(pieces.iter().map(|p| p.eval(phi)).sum())
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let (pieces, phi) = self.locate(theta);
        self.part
            .apply(pieces.iter().map(|p| p.derivative(phi)).sum())
    }

    /// Largest jump of value or slope between the two sides of either seam.
    pub fn seam_defect(&self) -> f64 {
        let h = 0.5 * self.omega;
        let side = |pieces: &[AngularPiece], phi: f64| -> (f64, f64) {
            (
                self.part.apply(pieces.iter().map(|p| p.eval(phi)).sum()),
                self.part
                    .apply(pieces.iter().map(|p| p.derivative(phi)).sum()),
            )
        };
        let mut worst: f64 = 0.0;
        for theta in [h, -h] {
            let (vm, dm) = side(&self.minus, theta);
            let (vp, dp) = side(&self.plus, sector_angle(Sector::Plus, theta));
            let scale = 1.0 + vm.abs().max(dm.abs());
            worst = worst
                .max((vm - vp).abs() / scale)
                .max((dm - dp).abs() / scale);
        }
        worst
    }
}

/// `Phi_{j,n}` (primal) or `Psi_{j,n}` (dual): the factor of `r^{lambda_j} log^n r` in order j.
#[derive(Clone, Debug)]
pub struct AngularTable {
    pub k: i32,
    pub p: u8,
    pub kind: ChainKind,
    pub omega: f64,
    pub homogeneities: Vec<i32>,
    entries: Vec<Vec<AngularFunction>>,
}

impl AngularTable {
    pub fn depth(&self) -> usize {
        self.entries.len() - 1
    }

    /// Zero beyond the stored log degree.
    pub fn get(&self, j: usize, n: usize) -> Result<AngularFunction> {
        let row = self.entries.get(j).ok_or_else(|| {
            Error::Invalid(format!(
                "angular table holds orders up to {}, asked {j}",
                self.depth()
            ))
        })?;
        Ok(row
            .get(n)
            .cloned()
            .unwrap_or_else(|| AngularFunction::zero(self.omega)))
    }

    pub fn log_degree(&self, j: usize) -> usize {
        self.entries
            .get(j)
            .map_or(0, |row| row.len().saturating_sub(1))
    }

    /// `sum_j (i zeta^2)^j r^{lambda_j} sum_n log^n r Phi_{j,n}(theta)` for `j <= m`.
    pub fn reassemble(&self, m: usize, zeta: f64, r: f64, theta: f64) -> Result<Complex64> {
        let iz2 = Complex64::new(0.0, zeta * zeta);
        let rho = r.ln();
        let mut acc = Complex64::default();
        for j in 0..=m {
            let row = self
                .entries
                .get(j)
                .ok_or_else(|| Error::Invalid("reassembly beyond table depth".into()))?;
            let radial: f64 = row
                .iter()
                .enumerate()
                .map(|(n, f)| rho.powi(n as i32) * f.eval(theta))
                .sum();
            acc += iz2.powi(j as i32) * r.powi(self.homogeneities[j]) * radial;
        }
        Ok(acc)
    }
}

pub fn angular_decompose(chain: &ShadowChain, p: u8) -> Result<AngularTable> {
    if p > 1 || (chain.k == 0 && p == 1) {
        return invalid(format!("no angular table for k = {}, p = {p}", chain.k));
    }
    let part = Part::select(chain.kind, p);
    let mut entries = Vec::with_capacity(chain.pairs.len());
    for (j, pair) in chain.pairs.iter().enumerate() {
        let minus = pair.minus.log_expansion();
        let plus = pair.plus.log_expansion();
        let levels = minus.len().max(plus.len());
        let mut row = Vec::with_capacity(levels);
        for n in 0..levels {
            let f = AngularFunction {
                omega: chain.omega,
                part,
                minus: minus.get(n).cloned().unwrap_or_default(),
                plus: plus.get(n).cloned().unwrap_or_default(),
            };
            let defect = f.seam_defect();
            if defect > SEAM_TOL {
                return Err(Error::Numerical(format!(
                    "angular function ({j},{n}) of k = {} is not C1 across the seams (defect {defect:.3e})",
                    chain.k
                )));
            }
            row.push(f);
        }
        entries.push(row);
    }
    Ok(AngularTable {
        k: chain.k,
        p,
        kind: chain.kind,
        omega: chain.omega,
        homogeneities: chain.pairs.iter().map(|q| q.homogeneity).collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn leading_terms() {
        let cfg = DomainConfig::new(PI / 4.0, 1.0).unwrap();
        let s = SingularSeries::primal(1, 1, 0, &cfg).unwrap();
        assert!((s.eval(0.7, 0.3).unwrap().re - 0.7 * 0.3f64.sin()).abs() < 1e-14);
        let k = SingularSeries::dual(0, 0, 0, &cfg).unwrap();
        assert!((k.eval(0.5, 2.0).unwrap().re + 0.5f64.ln() / (2.0 * PI)).abs() < 1e-14);
        assert!(SingularSeries::primal(0, 1, 0, &cfg).is_err());
        assert!(s.eval(0.0, 0.0).is_err());
    }

    #[test]
    fn physical_zeta() {
        let phys = PhysicalInputs {
            kappa: 2.0,
            mu0: 3.0,
            sigma: 6.0,
        };
        let cfg = DomainConfig::from_physical(1.0, phys).unwrap();
        assert!((cfg.zeta - 3.0).abs() < 1e-15);
    }
}
