use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate_period, DEFAULT_TOL};
use crate::shadow_engine::{build_chain, ChainKind};
use crate::singular_functions::{angular_decompose, AngularTable, DomainConfig};

/// `J^{k,p;k-2l,p}` from the angular tables of the dual `(k,p)` chain and the
/// primal `(k-2l,p)` chain, both of depth at least `l`.
pub fn coupling_from_tables(
    psi: &AngularTable,
    phi: &AngularTable,
    ell: usize,
    zeta: f64,
) -> Result<Complex64> {
    let k = psi.k;
    if phi.k != k - 2 * ell as i32 {
        return invalid(format!(
            "primal table k = {} does not pair with k = {k}, l = {ell}",
            phi.k
        ));
    }
    if psi.depth() < ell || phi.depth() < ell {
        return invalid(format!("angular tables too shallow for l = {ell}"));
    }
    let omega = psi.omega;
    let mut total = 0.0;
    for j in 0..=ell {
        let psi0 = psi.get(j, 0)?;
        let psi1 = if j == 0 { None } else { Some(psi.get(j, 1)?) };
        let phi0 = phi.get(ell - j, 0)?;
        let phi1 = if ell == j {
            None
        } else {
            Some(phi.get(ell - j, 1)?)
        };
        let w = 2.0 * f64::from(k - 2 * j as i32);
        let integrand = |t: f64| {
            let f0 = phi0.eval(t);
            let f1 = phi1.as_ref().map_or(0.0, |f| f.eval(t));
            let g1 = psi1.as_ref().map_or(0.0, |f| f.eval(t));
            Ok(Complex64::new(psi0.eval(t) * (w * f0 + f1) - g1 * f0, 0.0))
        };
        total += integrate_period(integrand, -0.5 * omega, &[0.5 * omega], DEFAULT_TOL)?.re;
    }
    Ok(Complex64::new(0.0, zeta * zeta).powi(ell as i32) * total)
}

/// `J^{k,p;k-2l,p}` for `k >= 2`, `1 <= l <= k/2`.
pub fn coupling_coefficient(k: i32, p: u8, ell: usize, cfg: &DomainConfig) -> Result<Complex64> {
    if k < 2 || ell == 0 || 2 * ell as i32 > k {
        return invalid(format!(
            "coupling needs k >= 2 and 1 <= l <= k/2, got k = {k}, l = {ell}"
        ));
    }
    let dual = build_chain(k, ChainKind::Dual, ell, cfg.omega)?;
    let primal = build_chain(k - 2 * ell as i32, ChainKind::Primal, ell, cfg.omega)?;
    if primal.k == 0 && p == 1 {
        return Ok(Complex64::default());
    }
    coupling_from_tables(
        &angular_decompose(&dual, p)?,
        &angular_decompose(&primal, p)?,
        ell,
        cfg.zeta,
    )
}

/// `J^{k,p;k2,p2}`: zero unless the parities agree and `k - k2` is a positive even number.
pub fn coupling_between(k: i32, p: u8, k2: i32, p2: u8, cfg: &DomainConfig) -> Result<Complex64> {
    let d = k - k2;
    if p != p2 || d <= 0 || d % 2 != 0 {
        return Ok(Complex64::default());
    }
    coupling_coefficient(k, p, (d / 2) as usize, cfg)
}

/// All couplings `J^{k,p;k-2l,p}` for `k <= k_max` at one parity.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingMatrix {
    pub p: u8,
    pub k_max: i32,
    entries: Vec<CouplingEntry>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CouplingEntry {
    pub k: i32,
    pub ell: usize,
    pub value: Complex64,
}

impl CouplingMatrix {
    pub fn build(cfg: &DomainConfig, p: u8, k_max: i32) -> Result<Self> {
        let mut entries = Vec::new();
        for k in 2..=k_max {
            for ell in 1..=(k / 2) as usize {
                entries.push(CouplingEntry {
                    k,
                    ell,
                    value: coupling_coefficient(k, p, ell, cfg)?,
                });
            }
        }
        Ok(CouplingMatrix { p, k_max, entries })
    }

    pub fn get(&self, k: i32, ell: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.k == k && e.ell == ell)
            .map_or(Complex64::default(), |e| e.value)
    }

    pub fn entries(&self) -> &[CouplingEntry] {
        &self.entries
    }
}
