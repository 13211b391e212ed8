//! Shadow terms of the primal (`z^k`) and dual (`z^-k`, `log z`) corner singularities.
//!
//! A shadow pair `(V, W)` of homogeneity `lambda` solves `dz dzb V = F` in the
//! conducting sector (F is the previous Minus part), `dz+ dzb+ W = 0` outside,
//! and the transmission conditions on both rays. For `lambda != 0` these are the
//! continuity of `dz` and `dzb` of the field; for `lambda = 0` the continuity of
//! the field and of its angular derivative.
//!
//! Construction: an exact interior primitive of F is added first, then the trace
//! defects are cancelled level by level (highest power of `log r` first) with the
//! harmonic Ansatz functions `z^lambda log^{n+1} z`, `zb^lambda log^{n+1} zb`,
//! `z^lambda log^n z` and their Plus-sector partners. Residuals are recomputed
//! exactly through the term algebra after every step.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::term_algebra::{
    normalize_angle, Ray, Sector, TermRecord, TermSum, TraceLogPolynomial, Wrt,
};

/// Relative level below which a trace coefficient counts as absent when choosing the next level.
const LEVEL_TOL: f64 = 1e-15;
/// Relative size allowed for the final PDE and transmission residuals.
pub const RESIDUAL_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Primal,
    Dual,
}

pub fn validate_omega(omega: f64) -> Result<()> {
    if !(1e-3..=2.0 * PI - 1e-3).contains(&omega) {
        return invalid(format!("omega = {omega} outside [1e-3, 2pi - 1e-3]"));
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sign_pow(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One shadow order: the Minus part in `z`, the Plus part in `z+`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorPair {
    pub minus: TermSum,
    pub plus: TermSum,
    pub homogeneity: i32,
}

impl SectorPair {
    pub fn new(minus: TermSum, plus: TermSum, homogeneity: i32) -> Result<Self> {
        if minus.sector() != Sector::Minus || plus.sector() != Sector::Plus {
            return Err(Error::SectorMismatch("sector pair parts swapped".into()));
        }
        for part in [&minus, &plus] {
            if let Some(h) = part.homogeneity()? {
                if h != homogeneity {
                    return invalid(format!(
                        "pair declared of degree {homogeneity} holds degree {h}"
                    ));
                }
            }
        }
        Ok(SectorPair {
            minus,
            plus,
            homogeneity,
        })
    }

    pub fn zero(homogeneity: i32) -> Self {
        SectorPair {
            minus: TermSum::zero(Sector::Minus),
            plus: TermSum::zero(Sector::Plus),
            homogeneity,
        }
    }

    pub fn scale(&self, c: impl Into<Complex64> + Copy) -> Self {
        SectorPair {
            minus: self.minus.scale(c),
            plus: self.plus.scale(c),
            homogeneity: self.homogeneity,
        }
    }

    pub fn sub(&self, other: &SectorPair) -> Result<Self> {
        SectorPair::new(
            self.minus.sub(&other.minus)?,
            self.plus.sub(&other.plus)?,
            self.homogeneity,
        )
    }

    pub fn log_degree(&self) -> u32 {
        self.minus.log_degree().max(self.plus.log_degree())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.minus.max_abs_coeff().max(self.plus.max_abs_coeff())
    }

    /// Complex value at polar point `(r, theta)`; the seam belongs to the Minus part.
    pub fn evaluate(&self, r: f64, theta: f64, omega: f64) -> Result<Complex64> {
        let theta = normalize_angle(theta);
        if theta.abs() <= 0.5 * omega {
            self.minus.evaluate(r, theta, omega)
        } else {
            self.plus.evaluate(r, theta, omega)
        }
    }

    /// `r d/dr` applied to both parts.
    pub fn euler(&self) -> SectorPair {
        SectorPair {
            minus: self.minus.euler(),
            plus: self.plus.euler(),
            homogeneity: self.homogeneity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransmissionForm {
    /// Jumps of `dz` and `dzb` (homogeneity != 0).
    Derivative,
    /// Jumps of the angular derivative and of the value (homogeneity 0).
    DirichletAngular,
}

/// Trace polynomials of the two transmission jumps on both rays, index 0 = `+omega/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpResidual {
    pub form: TransmissionForm,
    pub g: [TraceLogPolynomial; 2],
    pub h: [TraceLogPolynomial; 2],
}

impl JumpResidual {
    pub fn max_abs(&self) -> f64 {
        self.g
            .iter()
            .chain(self.h.iter())
            .fold(0.0, |m, t| m.max(t.max_abs()))
    }

    fn minus(&self, other: &JumpResidual) -> Result<JumpResidual> {
        Ok(JumpResidual {
            form: self.form,
            g: [
                self.g[0].add_scaled(&other.g[0], -1.0)?,
                self.g[1].add_scaled(&other.g[1], -1.0)?,
            ],
            h: [
                self.h[0].add_scaled(&other.h[0], -1.0)?,
                self.h[1].add_scaled(&other.h[1], -1.0)?,
            ],
        })
    }
}

fn form_for(lambda: i32) -> TransmissionForm {
    if lambda == 0 {
        TransmissionForm::DirichletAngular
    } else {
        TransmissionForm::Derivative
    }
}

/// Transmission jumps of a pair (the quantities that vanish for a genuine shadow).
pub fn transmission_jumps(pair: &SectorPair, omega: f64) -> Result<JumpResidual> {
    jumps_of(&pair.minus, &pair.plus, pair.homogeneity, omega)
}

fn jumps_of(v: &TermSum, w: &TermSum, lambda: i32, omega: f64) -> Result<JumpResidual> {
    let form = form_for(lambda);
    let (gv, gw, hv, hw, sign) = match form {
        TransmissionForm::Derivative => (
            v.differentiate(Wrt::Var),
            w.differentiate(Wrt::Var),
            v.differentiate(Wrt::ConjVar),
            w.differentiate(Wrt::ConjVar),
            1.0,
        ),
        TransmissionForm::DirichletAngular => {
            (v.angular(), w.angular(), v.clone(), w.clone(), -1.0)
        }
    };
    let trace = |a: &TermSum, b: &TermSum, ray: Ray| -> Result<TraceLogPolynomial> {
        a.restrict_to_ray(ray, omega)?
            .add_scaled(&b.restrict_to_ray(ray, omega)?, sign)
    };
    Ok(JumpResidual {
        form,
        g: [
            trace(&gv, &gw, Ray::PlusOmegaHalf)?,
            trace(&gv, &gw, Ray::MinusOmegaHalf)?,
        ],
        h: [
            trace(&hv, &hw, Ray::PlusOmegaHalf)?,
            trace(&hv, &hw, Ray::MinusOmegaHalf)?,
        ],
    })
}

/// Exact particular solution of `dz dzb V = f` in the Minus sector.
///
/// Terms carrying `log zb` (and log-free terms with a negative `zb` power) are
/// handled through conjugation so that the primitive never mixes logarithms.
pub fn interior_particular(f: &TermSum) -> Result<TermSum> {
    let mut acc = TermSum::zero(f.sector());
    for t in f.terms() {
        let single = TermSum::from_terms(f.sector(), [*t])?;
        let conj_route = t.s > 0 || (t.q == 0 && t.b < 0);
        let p = if conj_route {
            let c = single.conjugate();
            c.antiderivative(Wrt::ConjVar)?
                .antiderivative(Wrt::Var)?
                .conjugate()
        } else {
            single
                .antiderivative(Wrt::ConjVar)?
                .antiderivative(Wrt::Var)?
        };
        acc = acc.add(&p)?;
    }
    Ok(acc)
}

fn mono(sector: Sector, c: impl Into<Complex64>, a: i32, b: i32, q: u32, s: u32) -> TermSum {
    TermSum::monomial(sector, c, a, b, q, s)
}

fn sum(sector: Sector, parts: &[TermSum]) -> TermSum {
    let one = re(1.0);
    let refs: Vec<(Complex64, &TermSum)> = parts.iter().map(|p| (one, p)).collect();
    TermSum::combine(sector, &refs).expect("parts share the sector")
}

/// Ansatz step for `lambda != 0` at log level `t`: the returned pair contributes
/// `beta z^m log^t z` to the `dz` jump and `gamma zb^m log^t zb` to the `dzb`
/// jump on `+omega/2` (conjugates on `-omega/2`), modulo lower log powers.
fn ansatz_step(lambda: i32, t: u32, beta: Complex64, gamma: Complex64) -> (TermSum, TermSum) {
    let lam = f64::from(lambda);
    let t1 = f64::from(t + 1);
    let a = beta.im / (PI * lam * t1);
    let b = beta.re / lam;
    let ap = -gamma.im / (PI * lam * t1);
    let bp = -gamma.re / lam;
    let sg = sign_pow(lambda);
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    let v = sum(
        mn,
        &[
            mono(mn, a, lambda, 0, t + 1, 0),
            mono(mn, ap, 0, lambda, 0, t + 1),
            mono(mn, b, lambda, 0, t, 0),
        ],
    );
    let w = sum(
        pl,
        &[
            mono(pl, sg * a, lambda, 0, t + 1, 0),
            mono(pl, sg * ap, 0, lambda, 0, t + 1),
            mono(pl, sg * bp, 0, lambda, 0, t),
        ],
    );
    (v, w)
}

/// Ansatz step for `lambda = 0` and level `n >= 1`: contributes `beta log^n` to the
/// angular-derivative jump and `gamma log^{n+1}` to the value jump (log r basis).
fn ansatz_step_zero(n: u32, beta: Complex64, gamma: Complex64) -> (TermSum, TermSum) {
    let (n1, n2) = (f64::from(n + 1), f64::from(n + 2));
    let sum_aa = beta.im / (PI * n1 * n2);
    let diff_aa = gamma.im / (PI * n2);
    let sum_bb = beta.re / n1;
    let diff_bb = gamma.re;
    let (a, ap) = (0.5 * (sum_aa + diff_aa), 0.5 * (sum_aa - diff_aa));
    let (b, bp) = (0.5 * (sum_bb + diff_bb), 0.5 * (sum_bb - diff_bb));
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    let v = sum(
        mn,
        &[
            mono(mn, a, 0, 0, n + 2, 0),
            mono(mn, ap, 0, 0, 0, n + 2),
            mono(mn, b, 0, 0, n + 1, 0),
        ],
    );
    let w = sum(
        pl,
        &[
            mono(pl, a, 0, 0, n + 2, 0),
            mono(pl, ap, 0, 0, 0, n + 2),
            mono(pl, bp, 0, 0, 0, n + 1),
        ],
    );
    (v, w)
}

/// Exact closing step for `lambda = 0`, level 0: `beta0` is the angular-derivative
/// jump, `eta1 log r + eta0` the value jump, all read on `+omega/2`.
fn ansatz_step_zero_base(
    beta0: Complex64,
    eta1: Complex64,
    eta0: Complex64,
    omega: f64,
) -> (TermSum, TermSum) {
    let sum_aa = beta0.im / (2.0 * PI);
    let diff_aa = eta1.im / (2.0 * PI);
    let (a, ap) = (0.5 * (sum_aa + diff_aa), 0.5 * (sum_aa - diff_aa));
    let bp = 0.5 * (beta0.re - eta1.re);
    let s = 0.5 * (beta0.re + eta1.re);
    let bt = (eta0.im - 0.5 * s * omega - bp * (0.5 * omega - PI)) / PI;
    let b = s + bt;
    let c = PI * (PI - omega) * sum_aa - eta0.re;
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    let v = sum(
        mn,
        &[
            mono(mn, a, 0, 0, 2, 0),
            mono(mn, ap, 0, 0, 0, 2),
            mono(mn, b, 0, 0, 1, 0),
        ],
    );
    let w = sum(
        pl,
        &[
            mono(pl, a, 0, 0, 2, 0),
            mono(pl, ap, 0, 0, 0, 2),
            mono(pl, bt, 0, 0, 1, 0),
            mono(pl, bp, 0, 0, 0, 1),
            mono(pl, c, 0, 0, 0, 0),
        ],
    );
    (v, w)
}

fn top_degree(traces: &[TraceLogPolynomial], tol: f64) -> Option<usize> {
    traces.iter().filter_map(|t| t.degree_above(tol)).max()
}

/// Cancels the trace defects `jumps(V, W) - target` from level `top` down to `floor`.
fn close_traces(
    v: &mut TermSum,
    w: &mut TermSum,
    lambda: i32,
    target: &JumpResidual,
    floor: u32,
    omega: f64,
    scale: f64,
) -> Result<()> {
    let tol = LEVEL_TOL * scale;
    let defect = |v: &TermSum, w: &TermSum| -> Result<JumpResidual> {
        jumps_of(v, w, lambda, omega)?.minus(target)
    };
    if lambda != 0 {
        let m = f64::from(lambda - 1);
        let phase = Complex64::from_polar(1.0, -0.5 * m * omega);
        let d = defect(v, w)?;
        let Some(top) = top_degree(&[d.g[0].clone(), d.h[0].clone()], tol) else {
            return Ok(());
        };
        for t in (floor as usize..=top).rev() {
            let d = defect(v, w)?;
            let beta = -d.g[0].coeff(t) * phase;
            let gamma = -d.h[0].coeff(t) * phase.conj();
            if beta.norm() <= tol && gamma.norm() <= tol {
                continue;
            }
            let (dv, dw) = ansatz_step(lambda, t as u32, beta, gamma);
            *v = v.add(&dv)?;
            *w = w.add(&dw)?;
        }
    } else {
        let d = defect(v, w)?;
        let tg = d.g[0].degree_above(tol).map(|x| x as i64).unwrap_or(-1);
        let th = d.h[0].degree_above(tol).map(|x| x as i64).unwrap_or(-1);
        if tg < 0 && th < 0 {
            return Ok(());
        }
        let top = tg.max(th - 1).max(0) as u32;
        for n in (floor..=top).rev() {
            let d = defect(v, w)?;
            let (dv, dw) = if n >= 1 {
                let beta = -d.g[0].coeff(n as usize);
                let gamma = -d.h[0].coeff(n as usize + 1);
                ansatz_step_zero(n, beta, gamma)
            } else {
                ansatz_step_zero_base(-d.g[0].coeff(0), -d.h[0].coeff(1), -d.h[0].coeff(0), omega)
            };
            *v = v.add(&dv)?;
            *w = w.add(&dw)?;
        }
    }
    Ok(())
}

fn zero_target(lambda: i32) -> JumpResidual {
    let dh = if lambda == 0 { 0 } else { lambda - 1 };
    JumpResidual {
        form: form_for(lambda),
        g: [
            TraceLogPolynomial::zero(Ray::PlusOmegaHalf, dh),
            TraceLogPolynomial::zero(Ray::MinusOmegaHalf, dh),
        ],
        h: [
            TraceLogPolynomial::zero(Ray::PlusOmegaHalf, dh),
            TraceLogPolynomial::zero(Ray::MinusOmegaHalf, dh),
        ],
    }
}

/// Shadow of order j+1 from the shadow of order j.
///
/// The transmission form is selected from the homogeneity alone: the value and
/// angular-derivative form when the new homogeneity is 0, the derivative form otherwise.
pub fn next_shadow(prev: &SectorPair, omega: f64) -> Result<SectorPair> {
    validate_omega(omega)?;
    let lambda = prev.homogeneity + 2;
    let f = &prev.minus;
    let mut v = interior_particular(f)?;
    let mut w = TermSum::zero(Sector::Plus);
    let scale = f
        .max_abs_coeff()
        .max(v.max_abs_coeff())
        .max(f64::MIN_POSITIVE);
    close_traces(
        &mut v,
        &mut w,
        lambda,
        &zero_target(lambda),
        0,
        omega,
        scale,
    )?;
    let pair = SectorPair::new(v, w, lambda)?;
    let scale = scale.max(pair.max_abs_coeff());
    let jumps = transmission_jumps(&pair, omega)?.max_abs();
    let pde = shadow_pde_residual(&pair, prev)?;
    if jumps > RESIDUAL_TOL * scale || pde > RESIDUAL_TOL * scale {
        return Err(Error::Numerical(format!(
            "shadow of degree {lambda} left residuals (jump {jumps:.3e}, interior {pde:.3e}, scale {scale:.3e})"
        )));
    }
    Ok(pair)
}

/// Largest coefficient of `dz dzb pair.minus - prev.minus` and of `dz+ dzb+ pair.plus`.
pub fn shadow_pde_residual(pair: &SectorPair, prev: &SectorPair) -> Result<f64> {
    let lap = |t: &TermSum| t.differentiate(Wrt::Var).differentiate(Wrt::ConjVar);
    let rm = lap(&pair.minus).sub(&prev.minus)?;
    Ok(rm.max_abs_coeff().max(lap(&pair.plus).max_abs_coeff()))
}

/// Leading pair of a chain: `z^k`, `z^-k / (2 k pi)` or `-log z / (2 pi)`.
pub fn leading_pair(k: i32, kind: ChainKind) -> Result<SectorPair> {
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    match kind {
        ChainKind::Primal => {
            if k < 0 {
                return invalid("primal chains need k >= 0");
            }
            SectorPair::new(
                mono(mn, 1.0, k, 0, 0, 0),
                mono(pl, sign_pow(k), k, 0, 0, 0),
                k,
            )
        }
        ChainKind::Dual => {
            if k < 0 {
                return invalid("dual chains need k >= 0");
            }
            if k == 0 {
                let c = -1.0 / (2.0 * PI);
                SectorPair::new(mono(mn, c, 0, 0, 1, 0), mono(pl, c, 0, 0, 1, 0), 0)
            } else {
                let c = 1.0 / (2.0 * f64::from(k) * PI);
                SectorPair::new(
                    mono(mn, c, -k, 0, 0, 0),
                    mono(pl, c * sign_pow(k), -k, 0, 0, 0),
                    -k,
                )
            }
        }
    }
}

/// Closed-form first shadow of `z^k` for any integer k.
pub fn first_shadow_of_power(k: i32, omega: f64) -> Result<SectorPair> {
    validate_omega(omega)?;
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    let (s, c) = omega.sin_cos();
    let pair = match k {
        -1 => {
            let v = sum(
                mn,
                &[
                    mono(mn, s / PI, 1, 0, 1, 0),
                    mono(mn, (omega - PI) / PI, 0, 1, 0, 1),
                    mono(mn, -c, 1, 0, 0, 0),
                    mono(mn, 1.0, 0, 1, 1, 0),
                ],
            );
            let w = sum(
                pl,
                &[
                    mono(pl, -s / PI, 1, 0, 1, 0),
                    mono(pl, -omega / PI, 0, 1, 0, 1),
                    mono(pl, 1.0, 0, 1, 0, 0),
                ],
            );
            (v, w)
        }
        -2 => {
            let l2 = s / (2.0 * PI);
            let v = sum(
                mn,
                &[
                    mono(mn, l2, 0, 0, 2, 0),
                    mono(mn, l2, 0, 0, 0, 2),
                    mono(mn, -(s + (2.0 * PI - omega) * c) / PI, 0, 0, 1, 0),
                    mono(mn, -1.0, -1, 1, 0, 0),
                ],
            );
            let w = sum(
                pl,
                &[
                    mono(pl, l2, 0, 0, 2, 0),
                    mono(pl, l2, 0, 0, 0, 2),
                    mono(pl, -(s + (PI - omega) * c) / PI, 0, 0, 1, 0),
                    mono(pl, -c, 0, 0, 0, 1),
                    mono(pl, -c + (PI - omega) * s, 0, 0, 0, 0),
                ],
            );
            (v, w)
        }
        _ => {
            let (kf1, kf2) = (f64::from(k + 1), f64::from(k + 2));
            let s1 = (kf1 * omega).sin();
            let c1 = (kf1 * omega).cos();
            let al = s / (PI * kf2);
            let alp = s1 / (PI * kf1 * kf2);
            let v = sum(
                mn,
                &[
                    mono(mn, al, k + 2, 0, 1, 0),
                    mono(mn, alp, 0, k + 2, 0, 1),
                    mono(mn, -c / kf2, k + 2, 0, 0, 0),
                    mono(mn, 1.0 / kf1, k + 1, 1, 0, 0),
                ],
            );
            let sg = sign_pow(k);
            let w = sum(
                pl,
                &[
                    mono(pl, sg * al, k + 2, 0, 1, 0),
                    mono(pl, sg * alp, 0, k + 2, 0, 1),
                    mono(pl, sg * c1 / (kf1 * kf2), 0, k + 2, 0, 0),
                ],
            );
            (v, w)
        }
    };
    SectorPair::new(pair.0, pair.1, k + 2)
}

/// Closed-form first dual shadow generated by `-log z / (2 pi)`.
pub fn first_shadow_of_log(omega: f64) -> Result<SectorPair> {
    validate_omega(omega)?;
    let (mn, pl) = (Sector::Minus, Sector::Plus);
    let (s, c) = omega.sin_cos();
    let f4 = 4.0 * PI;
    let v = sum(
        mn,
        &[
            mono(mn, s / f4, 2, 0, 2, 0),
            mono(mn, s / f4, 0, 2, 0, 2),
            mono(mn, -(s + 2.0 * PI * c) / f4, 2, 0, 1, 0),
            mono(mn, -(3.0 * s + 2.0 * (PI - omega) * c) / f4, 0, 2, 0, 1),
            mono(mn, -0.25 * (PI * s - c), 2, 0, 0, 0),
            mono(mn, 1.0, 1, 1, 1, 0),
            mono(mn, -1.0, 1, 1, 0, 0),
        ],
    );
    let w = sum(
        pl,
        &[
            mono(pl, s / f4, 2, 0, 2, 0),
            mono(pl, s / f4, 0, 2, 0, 2),
            mono(pl, -s / f4, 2, 0, 1, 0),
            mono(pl, -(3.0 * s - 2.0 * omega * c) / f4, 0, 2, 0, 1),
            mono(pl, -0.25 * (3.0 * c + (2.0 * omega - PI) * s), 0, 2, 0, 0),
        ],
    );
    let scale = -1.0 / (2.0 * PI);
    SectorPair::new(v.scale(scale), w.scale(scale), 2)
}

/// Ordered shadows `[u_0, ..., u_J]` of one leading singularity.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowChain {
    pub k: i32,
    pub kind: ChainKind,
    pub omega: f64,
    pub pairs: Vec<SectorPair>,
}

pub fn build_chain(k: i32, kind: ChainKind, depth: usize, omega: f64) -> Result<ShadowChain> {
    validate_omega(omega)?;
    let mut pairs = vec![leading_pair(k, kind)?];
    for j in 1..=depth {
        let next = next_shadow(&pairs[j - 1], omega)?;
        pairs.push(next);
    }
    Ok(ShadowChain {
        k,
        kind,
        omega,
        pairs,
    })
}

impl ShadowChain {
    pub fn depth(&self) -> usize {
        self.pairs.len() - 1
    }

    /// Largest log power allowed in pair `j`.
    pub fn degree_bound(&self, j: usize) -> u32 {
        let j32 = j as u32;
        match self.kind {
            ChainKind::Primal => j32,
            // Even k: every order from k/2 on carries one extra log power.
            ChainKind::Dual => {
                if self.k % 2 == 0 && 2 * (j as i32) >= self.k {
                    j32 + 1
                } else {
                    j32
                }
            }
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.pairs.iter().fold(0.0, |m, p| m.max(p.max_abs_coeff()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rec = ChainRecord {
            k: self.k,
            kind: self.kind,
            omega: self.omega,
            depth: self.depth(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairRecord {
                    homogeneity: p.homogeneity,
                    minus: p.minus.to_records(),
                    plus: p.plus.to_records(),
                })
                .collect(),
        };
        serde_json::to_value(rec).expect("chain records serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let rec: ChainRecord = serde_json::from_value(value.clone())
            .map_err(|e| Error::Invalid(format!("chain json: {e}")))?;
        validate_omega(rec.omega)?;
        let pairs = rec
            .pairs
            .iter()
            .map(|p| {
                SectorPair::new(
                    TermSum::from_records(Sector::Minus, &p.minus)?,
                    TermSum::from_records(Sector::Plus, &p.plus)?,
                    p.homogeneity,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        if pairs.len() != rec.depth + 1 {
            return invalid("chain json: depth does not match the number of pairs");
        }
        Ok(ShadowChain {
            k: rec.k,
            kind: rec.kind,
            omega: rec.omega,
            pairs,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    homogeneity: i32,
    minus: Vec<TermRecord>,
    plus: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct ChainRecord {
    k: i32,
    kind: ChainKind,
    omega: f64,
    #[serde(rename = "J")]
    depth: usize,
    pairs: Vec<PairRecord>,
}

/// Interior monomial source `alpha z^(lambda-2-ell) zb^ell log^n z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorSource {
    pub alpha: Complex64,
    pub ell: i32,
    pub n: u32,
}

/// Trace datum `coeff * log^n` (of `z` for the g-trace, of `zb` for the h-trace when
/// lambda != 0; of `z` for both when lambda = 0), read on `+omega/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSource {
    pub coeff: Complex64,
    pub n: u32,
}

/// Level-structured transmission problem. Trace values on `-omega/2` are the
/// conjugates of the stored ones.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryProblem {
    pub lambda: i32,
    pub interior: Vec<InteriorSource>,
    pub trace_g: Vec<TraceSource>,
    pub trace_h: Vec<TraceSource>,
}

impl ElementaryProblem {
    pub fn is_empty(&self) -> bool {
        self.interior.is_empty() && self.trace_g.is_empty() && self.trace_h.is_empty()
    }

    /// Highest level carried: interior and g-data count at their log power, the
    /// lambda = 0 value trace one below its log power.
    pub fn top_level(&self) -> Option<u32> {
        let i = self.interior.iter().map(|s| s.n);
        let g = self.trace_g.iter().map(|s| s.n);
        let h = self.trace_h.iter().map(|s| {
            if self.lambda == 0 {
                s.n.saturating_sub(1)
            } else {
                s.n
            }
        });
        i.chain(g).chain(h).max()
    }

    fn interior_sum(&self) -> TermSum {
        let parts: Vec<TermSum> = self
            .interior
            .iter()
            .map(|s| {
                mono(
                    Sector::Minus,
                    s.alpha,
                    self.lambda - 2 - s.ell,
                    s.ell,
                    s.n,
                    0,
                )
            })
            .collect();
        sum(Sector::Minus, &parts)
    }

    /// The data as trace polynomials in `log r` on both rays.
    fn targets(&self, omega: f64) -> Result<JumpResidual> {
        let m = if self.lambda == 0 { 0 } else { self.lambda - 1 };
        let conj_h = self.lambda != 0;
        let build =
            |data: &[TraceSource], conj_var: bool, ray: Ray| -> Result<TraceLogPolynomial> {
                let parts: Vec<TermSum> = data
                    .iter()
                    .map(|d| {
                        let c = if ray == Ray::PlusOmegaHalf {
                            d.coeff
                        } else {
                            d.coeff.conj()
                        };
                        if conj_var {
                            mono(Sector::Minus, c, 0, m, 0, d.n)
                        } else {
                            mono(Sector::Minus, c, m, 0, d.n, 0)
                        }
                    })
                    .collect();
                let mut t = sum(Sector::Minus, &parts).restrict_to_ray(ray, omega)?;
                if t.coeffs.is_empty() {
                    t.homogeneity = m;
                }
                Ok(t)
            };
        Ok(JumpResidual {
            form: form_for(self.lambda),
            g: [
                build(&self.trace_g, false, Ray::PlusOmegaHalf)?,
                build(&self.trace_g, false, Ray::MinusOmegaHalf)?,
            ],
            h: [
                build(&self.trace_h, conj_h, Ray::PlusOmegaHalf)?,
                build(&self.trace_h, conj_h, Ray::MinusOmegaHalf)?,
            ],
        })
    }
}

/// Inverse of the `+omega/2` restriction of `var^m sum beta_n log^n var`.
fn trace_to_sources(
    t: &TraceLogPolynomial,
    m: i32,
    conj_var: bool,
    omega: f64,
    tol: f64,
) -> Vec<TraceSource> {
    let half = 0.5 * omega;
    let (phase, shift) = if conj_var {
        (
            Complex64::from_polar(1.0, f64::from(m) * half),
            Complex64::new(0.0, half),
        )
    } else {
        (
            Complex64::from_polar(1.0, -f64::from(m) * half),
            Complex64::new(0.0, -half),
        )
    };
    // P(rho) = phase * trace(rho); the sources are the Taylor coefficients of P at rho = shift.
    let p: Vec<Complex64> = t.coeffs.iter().map(|c| c * phase).collect();
    let mut out = Vec::new();
    for n in 0..p.len() {
        let mut beta = Complex64::default();
        let mut binom = 1.0;
        for (tt, pt) in p.iter().enumerate().skip(n) {
            if tt > n {
                binom = binom * tt as f64 / (tt - n) as f64;
            }
            beta += pt * binom * shift.powi((tt - n) as i32);
        }
        if beta.norm() > tol {
            out.push(TraceSource {
                coeff: beta,
                n: n as u32,
            });
        }
    }
    out
}

/// Leading interior primitive: `z^(l'+1) zb^(ell+1) log^n z / ((l'+1)(ell+1))`, or
/// `zb^(ell+1) log^(n+1) z / ((n+1)(ell+1))` when `ell = lambda - 1`.
pub fn v_star(lambda: i32, ell: i32, n: u32) -> TermSum {
    let lp = lambda - 2 - ell;
    let l1 = f64::from(ell + 1);
    if lp == -1 {
        mono(
            Sector::Minus,
            1.0 / (f64::from(n + 1) * l1),
            0,
            ell + 1,
            n + 1,
            0,
        )
    } else {
        mono(
            Sector::Minus,
            1.0 / (f64::from(lp + 1) * l1),
            lp + 1,
            ell + 1,
            n,
            0,
        )
    }
}

/// Solves the top log level of `p` and returns the particular pair together with
/// the exact residual problem, which lives on strictly lower levels.
pub fn elementary_step(
    p: &ElementaryProblem,
    omega: f64,
) -> Result<(SectorPair, ElementaryProblem)> {
    validate_omega(omega)?;
    let lambda = p.lambda;
    for s in &p.interior {
        if s.ell < 0 {
            return invalid("interior source with negative ell");
        }
    }
    let Some(n) = p.top_level() else {
        return Ok((SectorPair::zero(lambda), p.clone()));
    };
    let f = p.interior_sum();
    let target = p.targets(omega)?;
    let mut v = TermSum::zero(Sector::Minus);
    for s in p.interior.iter().filter(|s| s.n == n) {
        v = v.add(&v_star(lambda, s.ell, s.n).scale(s.alpha))?;
    }
    let mut w = TermSum::zero(Sector::Plus);
    let scale = f
        .max_abs_coeff()
        .max(target.max_abs())
        .max(v.max_abs_coeff())
        .max(f64::MIN_POSITIVE);
    close_traces(&mut v, &mut w, lambda, &target, n, omega, scale)?;

    let tol = 1e-13 * scale;
    let f_res = f.sub(&v.differentiate(Wrt::Var).differentiate(Wrt::ConjVar))?;
    let mut interior = Vec::new();
    for t in f_res.terms() {
        if t.s > 0 || t.a + t.b != lambda - 2 {
            return Err(Error::Numerical(
                "interior residual left the holomorphic-log space".into(),
            ));
        }
        if t.coeff.norm() > tol {
            interior.push(InteriorSource {
                alpha: t.coeff,
                ell: t.b,
                n: t.q,
            });
        }
    }
    let rest = target.minus(&jumps_of(&v, &w, lambda, omega)?)?;
    let m = if lambda == 0 { 0 } else { lambda - 1 };
    let residual = ElementaryProblem {
        lambda,
        interior,
        trace_g: trace_to_sources(&rest.g[0], m, false, omega, tol),
        trace_h: trace_to_sources(&rest.h[0], m, lambda != 0, omega, tol),
    };
    Ok((SectorPair::new(v, w, lambda)?, residual))
}
