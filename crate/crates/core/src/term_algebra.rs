//! Exact algebra of sector-wise monomials `c z^a zb^b log^q z log^s zb`.
//!
//! Minus-sector terms are written in `z`, Plus-sector terms in `z+ = -z`.
//! Both sector variables use the principal logarithm, so a Plus term evaluated
//! at polar angle `theta` sees the shifted angle returned by [`sector_angle`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pruning threshold applied on every canonicalization.
pub const PRUNE_REL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);
const SECTOR_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Minus,
    Plus,
}

impl Sector {
    pub fn name(self) -> &'static str {
        match self {
            Sector::Minus => "minus",
            Sector::Plus => "plus",
        }
    }
}

/// Variable of differentiation or integration: the sector variable or its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrt {
    Var,
    ConjVar,
}

/// One of the two rays of the interface, `theta = +omega/2` or `theta = -omega/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ray {
    PlusOmegaHalf,
    MinusOmegaHalf,
}

impl Ray {
    pub const BOTH: [Ray; 2] = [Ray::PlusOmegaHalf, Ray::MinusOmegaHalf];

    pub fn theta(self, omega: f64) -> f64 {
        match self {
            Ray::PlusOmegaHalf => 0.5 * omega,
            Ray::MinusOmegaHalf => -0.5 * omega,
        }
    }
}

/// Maps any angle into (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Argument of the sector variable at polar angle `theta` (already in (-pi, pi]).
pub fn sector_angle(sector: Sector, theta: f64) -> f64 {
    match sector {
        Sector::Minus => theta,
        Sector::Plus => {
            if theta > 0.0 {
                theta - PI
            } else {
                theta + PI
            }
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * f64::from(n - j) / f64::from(j + 1);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub sector: Sector,
    pub coeff: Complex64,
    pub a: i32,
    pub b: i32,
    pub q: u32,
    pub s: u32,
}

type Key = (i32, i32, u32, u32);

impl Term {
    pub fn new(sector: Sector, coeff: Complex64, a: i32, b: i32, q: u32, s: u32) -> Self {
        Term {
            sector,
            coeff,
            a,
            b,
            q,
            s,
        }
    }

    pub fn degree(&self) -> i32 {
        self.a + self.b
    }

    pub fn log_degree(&self) -> u32 {
        self.q + self.s
    }

    fn key(&self) -> Key {
        (self.a, self.b, self.q, self.s)
    }

    /// Value at radius `r` and sector-variable argument `phi`.
    pub fn eval_at_arg(&self, r: f64, phi: f64) -> Complex64 {
        let lr = r.ln();
        let mut v = self.coeff
            * r.powi(self.degree())
            * Complex64::from_polar(1.0, f64::from(self.a - self.b) * phi);
        if self.q > 0 {
            v *= Complex64::new(lr, phi).powu(self.q);
        }
        if self.s > 0 {
            v *= Complex64::new(lr, -phi).powu(self.s);
        }
        v
    }

    /// Expansion in powers of `log r`: entry `n` holds the angular factor of `log^n r`.
    fn log_expansion(&self) -> Vec<AngularPiece> {
        let freq = self.a - self.b;
        let mut out = Vec::new();
        for t1 in 0..=self.q {
            for t2 in 0..=self.s {
                let c = self.coeff
                    * binomial(self.q, t1)
                    * binomial(self.s, t2)
                    * I.powu(self.q - t1)
                    * (-I).powu(self.s - t2);
                out.push(AngularPiece {
                    rho_power: t1 + t2,
                    coeff: c,
                    freq,
                    power: (self.q - t1) + (self.s - t2),
                });
            }
        }
        out
    }
}

/// `coeff * phi^power * exp(i freq phi)`, the building block of angular functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularPiece {
    /// Power of `log r` this piece multiplies (bookkeeping during expansion).
    pub rho_power: u32,
    pub coeff: Complex64,
    pub freq: i32,
    pub power: u32,
}

impl AngularPiece {
    pub fn eval(&self, phi: f64) -> Complex64 {
        self.coeff
            * phi.powi(self.power as i32)
            * Complex64::from_polar(1.0, f64::from(self.freq) * phi)
    }

    pub fn derivative(&self, phi: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, f64::from(self.freq) * phi);
        let mut d = I * f64::from(self.freq) * phi.powi(self.power as i32);
        if self.power > 0 {
            d += f64::from(self.power) * phi.powi(self.power as i32 - 1);
        }
        self.coeff * d * e
    }
}

/// Restriction of a homogeneous term sum to one ray: `r^homogeneity * sum_t coeffs[t] log^t r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLogPolynomial {
    pub ray: Ray,
    pub homogeneity: i32,
    pub coeffs: Vec<Complex64>,
}

impl TraceLogPolynomial {
    pub fn zero(ray: Ray, homogeneity: i32) -> Self {
        TraceLogPolynomial {
            ray,
            homogeneity,
            coeffs: Vec::new(),
        }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        let lr = r.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * lr + c;
        }
        acc * r.powi(self.homogeneity)
    }

    pub fn coeff(&self, t: usize) -> Complex64 {
        self.coeffs.get(t).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Highest power of `log r` whose coefficient exceeds `tol` in modulus.
    pub fn degree_above(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    pub fn add_scaled(&self, other: &TraceLogPolynomial, scale: f64) -> Result<TraceLogPolynomial> {
        if self.ray != other.ray {
            return Err(Error::Invalid("adding traces on different rays".into()));
        }
        let homogeneity = if self.coeffs.is_empty() {
            other.homogeneity
        } else if other.coeffs.is_empty() || other.homogeneity == self.homogeneity {
            self.homogeneity
        } else {
            return Err(Error::Invalid(format!(
                "adding traces of homogeneity {} and {}",
                self.homogeneity, other.homogeneity
            )));
        };
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|t| self.coeff(t) + other.coeff(t) * scale)
            .collect();
        Ok(TraceLogPolynomial {
            ray: self.ray,
            homogeneity,
            coeffs,
        })
    }
}

/// A canonical sum of terms living in one sector.
#[derive(Clone, Debug, PartialEq)]
pub struct TermSum {
    sector: Sector,
    terms: Vec<Term>,
}

impl TermSum {
    pub fn zero(sector: Sector) -> Self {
        TermSum {
            sector,
            terms: Vec::new(),
        }
    }

    pub fn monomial(
        sector: Sector,
        coeff: impl Into<Complex64>,
        a: i32,
        b: i32,
        q: u32,
        s: u32,
    ) -> Self {
        let mut map = BTreeMap::new();
        map.insert((a, b, q, s), coeff.into());
        Self::canonical(sector, map)
    }

    pub fn from_terms(sector: Sector, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut map: BTreeMap<Key, Complex64> = BTreeMap::new();
        for t in terms {
            if t.sector != sector {
                return Err(Error::SectorMismatch(format!(
                    "{} term in a {} sum",
                    t.sector.name(),
                    sector.name()
                )));
            }
            *map.entry(t.key()).or_default() += t.coeff;
        }
        Ok(Self::canonical(sector, map))
    }

    fn canonical(sector: Sector, map: BTreeMap<Key, Complex64>) -> Self {
        let max = map.values().fold(0.0f64, |m, c| m.max(c.norm()));
        let cut = PRUNE_REL * max;
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| c.norm() > cut && c.norm() > 0.0)
            .map(|((a, b, q, s), coeff)| Term {
                sector,
                coeff,
                a,
                b,
                q,
                s,
            })
            .collect();
        terms.sort_by(|x, y| {
            y.a.cmp(&x.a)
                .then(x.b.cmp(&y.b))
                .then(y.q.cmp(&x.q))
                .then(y.s.cmp(&x.s))
        });
        TermSum { sector, terms }
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.norm()))
    }

    /// Coefficient of the monomial `(a, b, q, s)`, zero when absent.
    pub fn coeff_of(&self, a: i32, b: i32, q: u32, s: u32) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.key() == (a, b, q, s))
            .map(|t| t.coeff)
            .unwrap_or_default()
    }

    /// Common degree `a+b`; `None` for the empty sum.
    pub fn homogeneity(&self) -> Result<Option<i32>> {
        let mut deg = None;
        for t in &self.terms {
            match deg {
                None => deg = Some(t.degree()),
                Some(d) if d != t.degree() => {
                    return Err(Error::Invalid(format!(
                        "sum mixes degrees {} and {}",
                        d,
                        t.degree()
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn log_degree(&self) -> u32 {
        self.terms.iter().map(Term::log_degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let map = self.terms.iter().map(|t| (t.key(), t.coeff * c)).collect();
        Self::canonical(self.sector, map)
    }

    pub fn add(&self, other: &TermSum) -> Result<Self> {
        Self::combine(
            self.sector,
            &[
                (Complex64::new(1.0, 0.0), self),
                (Complex64::new(1.0, 0.0), other),
            ],
        )
    }

    pub fn sub(&self, other: &TermSum) -> Result<Self> {
        Self::combine(
            self.sector,
            &[
                (Complex64::new(1.0, 0.0), self),
                (Complex64::new(-1.0, 0.0), other),
            ],
        )
    }

    /// Linear combination; every sum must live in `sector`.
    pub fn combine(sector: Sector, parts: &[(Complex64, &TermSum)]) -> Result<Self> {
        let mut map: BTreeMap<Key, Complex64> = BTreeMap::new();
        for (c, f) in parts {
            if f.sector != sector {
                return Err(Error::SectorMismatch(format!(
                    "combining a {} sum into {}",
                    f.sector.name(),
                    sector.name()
                )));
            }
            for t in &f.terms {
                *map.entry(t.key()).or_default() += t.coeff * c;
            }
        }
        Ok(Self::canonical(sector, map))
    }

    /// Complex conjugate: swaps (a, q) with (b, s) and conjugates coefficients.
    pub fn conjugate(&self) -> Self {
        let map = self
            .terms
            .iter()
            .map(|t| ((t.b, t.a, t.s, t.q), t.coeff.conj()))
            .collect();
        Self::canonical(self.sector, map)
    }

    pub fn mul(&self, other: &TermSum) -> Result<Self> {
        if self.sector != other.sector {
            return Err(Error::SectorMismatch(
                "multiplying sums of different sectors".into(),
            ));
        }
        let mut map: BTreeMap<Key, Complex64> = BTreeMap::new();
        for x in &self.terms {
            for y in &other.terms {
                let (q, s) = (x.q + y.q, x.s + y.s);
                if q > 0 && s > 0 {
                    return Err(Error::MixedLog("multiplication"));
                }
                *map.entry((x.a + y.a, x.b + y.b, q, s)).or_default() += x.coeff * y.coeff;
            }
        }
        Ok(Self::canonical(self.sector, map))
    }

    pub fn differentiate(&self, wrt: Wrt) -> Self {
        let mut map: BTreeMap<Key, Complex64> = BTreeMap::new();
        for t in &self.terms {
            match wrt {
                Wrt::Var => {
                    if t.a != 0 {
                        *map.entry((t.a - 1, t.b, t.q, t.s)).or_default() +=
                            t.coeff * f64::from(t.a);
                    }
                    if t.q > 0 {
                        *map.entry((t.a - 1, t.b, t.q - 1, t.s)).or_default() +=
                            t.coeff * f64::from(t.q);
                    }
                }
                Wrt::ConjVar => {
                    if t.b != 0 {
                        *map.entry((t.a, t.b - 1, t.q, t.s)).or_default() +=
                            t.coeff * f64::from(t.b);
                    }
                    if t.s > 0 {
                        *map.entry((t.a, t.b - 1, t.q, t.s - 1)).or_default() +=
                            t.coeff * f64::from(t.s);
                    }
                }
            }
        }
        Self::canonical(self.sector, map)
    }

    /// Exact primitive. Exponent -1 in the integrated variable raises the log power
    /// by one; otherwise the exponent increments and the log polynomial is corrected
    /// by repeated integration by parts.
    pub fn antiderivative(&self, wrt: Wrt) -> Result<Self> {
        let mut map: BTreeMap<Key, Complex64> = BTreeMap::new();
        for t in &self.terms {
            // (power, log power) of the integrated variable, and of the other one.
            let (p, l, other_log) = match wrt {
                Wrt::Var => (t.a, t.q, t.s),
                Wrt::ConjVar => (t.b, t.s, t.q),
            };
            let mut put = |p_new: i32, l_new: u32, c: Complex64| {
                let key = match wrt {
                    Wrt::Var => (p_new, t.b, l_new, t.s),
                    Wrt::ConjVar => (t.a, p_new, t.q, l_new),
                };
                *map.entry(key).or_default() += c;
            };
            if p == -1 {
                if other_log > 0 {
                    return Err(Error::MixedLog("antiderivative"));
                }
                put(0, l + 1, t.coeff / f64::from(l + 1));
            } else {
                let inv = 1.0 / f64::from(p + 1);
                let mut c = t.coeff * inv;
                let mut j = l;
                loop {
                    put(p + 1, j, c);
                    if j == 0 {
                        break;
                    }
                    c *= -f64::from(j) * inv;
                    j -= 1;
                }
            }
        }
        Ok(Self::canonical(self.sector, map))
    }

    /// `z d/dz + zb d/dzb`, which is `r d/dr`.
    pub fn euler(&self) -> Self {
        let dz = self.differentiate(Wrt::Var).shift(1, 0);
        let dzb = self.differentiate(Wrt::ConjVar).shift(0, 1);
        dz.add(&dzb).expect("same sector")
    }

    /// `z d/dz - zb d/dzb`, which is `-i d/dtheta`.
    pub fn angular(&self) -> Self {
        let dz = self.differentiate(Wrt::Var).shift(1, 0);
        let dzb = self.differentiate(Wrt::ConjVar).shift(0, 1);
        dz.sub(&dzb).expect("same sector")
    }

    /// Multiplies by `var^da conj^db`.
    pub fn shift(&self, da: i32, db: i32) -> Self {
        let map = self
            .terms
            .iter()
            .map(|t| ((t.a + da, t.b + db, t.q, t.s), t.coeff))
            .collect();
        Self::canonical(self.sector, map)
    }

    pub fn evaluate(&self, r: f64, theta: f64, omega: f64) -> Result<Complex64> {
        let theta = normalize_angle(theta);
        let half = 0.5 * omega;
        let inside = match self.sector {
            Sector::Minus => theta.abs() <= half + SECTOR_SLACK,
            Sector::Plus => theta.abs() >= half - SECTOR_SLACK,
        };
        if !inside {
            return Err(Error::Domain {
                theta,
                sector: self.sector.name(),
                omega,
            });
        }
        if r < 0.0 || !r.is_finite() {
            return Err(Error::Singular(r));
        }
        let phi = sector_angle(self.sector, theta);
        if r == 0.0 {
            let mut acc = Complex64::default();
            for t in &self.terms {
                if t.degree() < 0 || t.log_degree() > 0 {
                    return Err(Error::Singular(r));
                }
                if t.degree() == 0 {
                    acc += t.coeff * Complex64::from_polar(1.0, f64::from(t.a - t.b) * phi);
                }
            }
            return Ok(acc);
        }
        Ok(self.terms.iter().map(|t| t.eval_at_arg(r, phi)).sum())
    }

    /// Angular factors of `log^n r` for n = 0..=log_degree, in the sector variable's argument.
    pub fn log_expansion(&self) -> Vec<Vec<AngularPiece>> {
        let mut out: Vec<Vec<AngularPiece>> = vec![Vec::new(); self.log_degree() as usize + 1];
        if self.is_empty() {
            return out;
        }
        for t in &self.terms {
            for p in t.log_expansion() {
                out[p.rho_power as usize].push(p);
            }
        }
        out.into_iter().map(merge_pieces).collect()
    }

    pub fn restrict_to_ray(&self, ray: Ray, omega: f64) -> Result<TraceLogPolynomial> {
        let homogeneity = self.homogeneity()?.unwrap_or(0);
        let phi = sector_angle(self.sector, ray.theta(omega));
        let coeffs = self
            .log_expansion()
            .iter()
            .map(|pieces| pieces.iter().map(|p| p.eval(phi)).sum())
            .collect::<Vec<Complex64>>();
        let coeffs = if self.is_empty() { Vec::new() } else { coeffs };
        Ok(TraceLogPolynomial {
            ray,
            homogeneity,
            coeffs,
        })
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|t| TermRecord {
                sector: t.sector,
                re: t.coeff.re,
                im: t.coeff.im,
                a: t.a,
                b: t.b,
                q: t.q,
                s: t.s,
            })
            .collect()
    }

    pub fn from_records(sector: Sector, records: &[TermRecord]) -> Result<Self> {
        Self::from_terms(
            sector,
            records
                .iter()
                .map(|r| Term::new(r.sector, Complex64::new(r.re, r.im), r.a, r.b, r.q, r.s)),
        )
    }
}

fn merge_pieces(pieces: Vec<AngularPiece>) -> Vec<AngularPiece> {
    let mut map: BTreeMap<(i32, u32), (u32, Complex64)> = BTreeMap::new();
    for p in pieces {
        let e = map
            .entry((p.freq, p.power))
            .or_insert((p.rho_power, Complex64::default()));
        e.1 += p.coeff;
    }
    map.into_iter()
        .filter(|(_, (_, c))| c.norm() > 0.0)
        .map(|((freq, power), (rho_power, coeff))| AngularPiece {
            rho_power,
            coeff,
            freq,
            power,
        })
        .collect()
}

/// JSON row of a serialized term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub sector: Sector,
    pub re: f64,
    pub im: f64,
    pub a: i32,
    pub b: i32,
    pub q: u32,
    pub s: u32,
}

impl Serialize for TermSum {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let (v, vb) = match self.sector {
            Sector::Minus => ("z", "zb"),
            Sector::Plus => ("z+", "zb+"),
        };
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.12e}{:+.12e}i)", t.coeff.re, t.coeff.im)?;
            if t.a != 0 {
                write!(f, " {v}^{}", t.a)?;
            }
            if t.b != 0 {
                write!(f, " {vb}^{}", t.b)?;
            }
            if t.q != 0 {
                write!(f, " log^{}({v})", t.q)?;
            }
            if t.s != 0 {
                write!(f, " log^{}({vb})", t.s)?;
            }
        }
        Ok(())
    }
}
