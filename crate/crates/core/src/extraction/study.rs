use num_complex::Complex64;
use serde::Serialize;

use super::{CircleFamily, FieldOnCircle, LambdaEstimate, Provenance};
use crate::error::{invalid, Error, Result};

/// Errors below this many rounding units of the integrand size are not fitted.
const NOISE_UNITS: f64 = 64.0;
/// A point enters the fit only if its error exceeds the noise floor this many times.
const NOISE_MARGIN: f64 = 100.0;
const EXACT_TOL: f64 = 1e-10;
pub const MIN_FIT_POINTS: usize = 4;

/// `R0 = zeta R (1 + sqrt|log R|)`.
pub fn r0(zeta: f64, r: f64) -> f64 {
    zeta * r * (1.0 + r.ln().abs().sqrt())
}

pub fn geometric_grid(r_max: f64, r_min: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(r_min > 0.0 && r_max > r_min) {
        return invalid(format!(
            "bad radius grid {r_max} .. {r_min} with {n} points"
        ));
    }
    let q = (r_min / r_max).powf(1.0 / (n - 1) as f64);
    Ok((0..n).map(|i| r_max * q.powi(i as i32)).collect())
}

/// `R^r_power R0^r0_power |log R|^log`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelTerm {
    pub r_power: i32,
    pub r0_power: u32,
    pub log: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorModel {
    pub terms: Vec<ModelTerm>,
}

impl ErrorModel {
    pub fn value(&self, zeta: f64, r: f64) -> f64 {
        let rz = r0(zeta, r);
        self.terms
            .iter()
            .map(|t| {
                r.powi(t.r_power)
                    * rz.powi(t.r0_power as i32)
                    * if t.log { r.ln().abs() } else { 1.0 }
            })
            .sum()
    }

    /// Power of R of the leading term once the logarithms are ignored.
    pub fn expected_slope(&self) -> i32 {
        self.terms
            .iter()
            .map(|t| t.r_power + t.r0_power as i32)
            .min()
            .unwrap_or(0)
    }

    /// Factor divided out of the error before fitting: the model with `R0` read as
    /// `zeta R`, over `R^expected_slope`. Only the explicit `|log R|` factors and the
    /// relative weight of the terms remain; the `sqrt|log R|` in `R0` is an envelope.
    pub fn log_factor(&self, zeta: f64, r: f64) -> f64 {
        let e = self.expected_slope();
        self.terms
            .iter()
            .map(|t| {
                let p = t.r_power + t.r0_power as i32 - e;
                zeta.powi(t.r0_power as i32) * r.powi(p) * if t.log { r.ln().abs() } else { 1.0 }
            })
            .sum()
    }
}

pub trait Extractor: Send + Sync {
    fn label(&self) -> String;
    fn zeta(&self) -> f64;
    fn estimate(&self, a: &dyn FieldOnCircle) -> Result<Vec<LambdaEstimate>>;
    fn model(&self, k: i32, p: u8) -> ErrorModel;
    /// Whether the estimate for `k` includes corrections beyond the raw functional.
    fn corrected(&self, k: i32) -> bool;
}

#[derive(Clone, Debug)]
pub enum Reference {
    /// Prescribed coefficients `(k, p, Lambda)`.
    Known(Vec<(i32, u8, Complex64)>),
    /// The estimates themselves at a small radius.
    AtRadius(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub r0: f64,
    pub raw: Complex64,
    pub estimate: Complex64,
    pub error: Complex64,
    pub err_abs: f64,
    pub model: f64,
    pub noise_floor: f64,
    pub used: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SlopeFit {
    Exact,
    Fitted { slope: f64, points: usize },
    Insufficient { points: usize },
}

impl SlopeFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            SlopeFit::Fitted { slope, .. } => Some(*slope),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSeries {
    pub k: i32,
    pub p: u8,
    pub corrected: bool,
    pub reference: Complex64,
    pub model: ErrorModel,
    pub expected_slope: i32,
    pub rows: Vec<SweepRow>,
    pub fit: SlopeFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionReport {
    pub method: String,
    pub zeta: f64,
    pub provenance: Provenance,
    pub series: Vec<SweepSeries>,
}

impl ExtractionReport {
    pub fn series(&self, k: i32, p: u8) -> Option<&SweepSeries> {
        self.series.iter().find(|s| s.k == k && s.p == p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p,R,err_re,err_im,err_abs,model_value,corrected_flag\n");
        for s in &self.series {
            for row in &s.rows {
                out.push_str(&format!(
                    "{},{},{:e},{:e},{:e},{:e},{:e},{}\n",
                    s.k,
                    s.p,
                    row.r,
                    row.error.re,
                    row.error.im,
                    row.err_abs,
                    row.model,
                    u8::from(s.corrected)
                ));
            }
        }
        out
    }
}

/// Least-squares slope of `log(err / log_factor)` against `log R` over the used rows.
pub fn fit_slope(
    rows: &[SweepRow],
    model: &ErrorModel,
    zeta: f64,
    reference: Complex64,
) -> SlopeFit {
    // Rows left out of the fit are at rounding level already.
    if rows
        .iter()
        .all(|r| !r.used || r.err_abs <= EXACT_TOL * reference.norm().max(1.0))
    {
        return SlopeFit::Exact;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.used)
        .map(|r| (r.r.ln(), (r.err_abs / model.log_factor(zeta, r.r)).ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return SlopeFit::Insufficient { points: pts.len() };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    SlopeFit::Fitted {
        slope: sxy / sxx,
        points: pts.len(),
    }
}

fn estimates_on_grid(
    ex: &dyn Extractor,
    family: &dyn CircleFamily,
    grid: &[f64],
) -> Result<Vec<Vec<LambdaEstimate>>> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(grid.len())
        .max(1);
    let chunk = grid.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|rs| {
                s.spawn(move || {
                    rs.iter()
                        .map(|&r| ex.estimate(family.circle(r)?.as_ref()))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(grid.len());
        for h in handles {
            out.extend(
                h.join()
                    .map_err(|_| Error::Numerical("sweep worker panicked".into()))??,
            );
        }
        Ok(out)
    })
}

/// Runs the extractor over the radius grid and fits error slopes against the model.
pub fn convergence_study(
    ex: &dyn Extractor,
    family: &dyn CircleFamily,
    reference: &Reference,
    grid: &[f64],
) -> Result<ExtractionReport> {
    if grid.is_empty() {
        return invalid("empty radius grid");
    }
    let per_r = estimates_on_grid(ex, family, grid)?;
    let refs: Vec<(i32, u8, Complex64)> = match reference {
        Reference::Known(v) => v.clone(),
        Reference::AtRadius(r) => ex
            .estimate(family.circle(*r)?.as_ref())?
            .iter()
            .map(|e| (e.k, e.p, e.lambda))
            .collect(),
    };
    let zeta = ex.zeta();
    let mut series = Vec::new();
    for first in &per_r[0] {
        let (k, p) = (first.k, first.p);
        let reference = refs
            .iter()
            .find(|x| x.0 == k && x.1 == p)
            .map_or(Complex64::default(), |x| x.2);
        let model = ex.model(k, p);
        let rows: Vec<SweepRow> = per_r
            .iter()
            .filter_map(|ests| ests.iter().find(|e| e.k == k && e.p == p))
            .map(|e| {
                let error = e.lambda - reference;
                let noise_floor = NOISE_UNITS * f64::EPSILON * e.magnitude;
                SweepRow {
                    r: e.r,
                    r0: r0(zeta, e.r),
                    raw: e.raw,
                    estimate: e.lambda,
                    error,
                    err_abs: error.norm(),
                    model: model.value(zeta, e.r),
                    noise_floor,
                    used: error.norm() > NOISE_MARGIN * noise_floor,
                }
            })
            .collect();
        let fit = fit_slope(&rows, &model, zeta, reference);
        series.push(SweepSeries {
            k,
            p,
            corrected: ex.corrected(k),
            reference,
            expected_slope: model.expected_slope(),
            model,
            rows,
            fit,
        });
    }
    Ok(ExtractionReport {
        method: ex.label(),
        zeta,
        provenance: family.provenance(),
        series,
    })
}
