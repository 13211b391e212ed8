//! Composite Gauss-Legendre rules over one period of the angle.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const NODES: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: u32 = 10;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on [-1, 1] by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(NODES))
    }
}

/// Sorted, deduplicated segment ends covering `[start, start + 2 pi]`.
pub fn period_segments(start: f64, breaks: &[f64]) -> Vec<f64> {
    let tp = 2.0 * PI;
    let mut pts: Vec<f64> = breaks
        .iter()
        .map(|b| start + (b - start).rem_euclid(tp))
        .collect();
    pts.push(start);
    pts.push(start + tp);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    pts
}

fn composite<F>(f: &F, ends: &[f64], panels: usize) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let rule = GaussLegendre::standard();
    let mut total = Complex64::default();
    let mut abs_total = 0.0;
    for seg in ends.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let a = seg[0] + p as f64 * h;
            let half = 0.5 * h;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let v = f(a + half * (1.0 + x))?;
                total += v * (w * half);
                abs_total += v.norm() * w * half;
            }
        }
    }
    Ok((total, abs_total))
}

/// `int f dtheta` over one period starting at `start`, with panel ends at `breaks`.
///
/// Each segment between breakpoints is split uniformly; the panel count is
/// doubled until two successive results agree to `tol` relative to `int |f|`.
pub fn integrate_period<F>(f: F, start: f64, breaks: &[f64], tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    integrate_period_abs(f, start, breaks, tol).map(|(v, _)| v)
}

/// As [`integrate_period`], also returning `int |f| dtheta`.
pub fn integrate_period_abs<F>(
    f: F,
    start: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let ends = period_segments(start, breaks);
    let mut panels = 1;
    let (mut prev, _) = composite(&f, &ends, panels)?;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let (cur, abs) = composite(&f, &ends, panels)?;
        if (cur - prev).norm() <= tol * abs.max(f64::MIN_POSITIVE) {
            return Ok((cur, abs));
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "angular quadrature did not settle after {panels} panels per segment"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_degree_31() {
        let g = GaussLegendre::new(16);
        let s: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(x, w)| w * x.powi(30))
            .sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kinked_integrand() {
        let v =
            integrate_period(|t| Ok(Complex64::new(t.abs(), 0.0)), -1.0, &[0.0], 1e-12).unwrap();
        let exact = 0.5 + 0.5 * (2.0 * PI - 1.0).powi(2);
        assert!((v.re - exact).abs() < 1e-12);
    }
}
