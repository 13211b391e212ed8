//! The subcommands, each driven by a validated [`RunConfig`].

use std::f64::consts::PI;
use std::fmt::Write;

use eddycorner_core::extraction::{
    convergence_study, geometric_grid, CircleFamily, ExtractionReport, Extractor,
    ManufacturedField, MomentSetup, QuasiDualSetup, Reference, SlopeFit,
};
use eddycorner_core::shadow_engine::{build_chain, ChainKind};
use eddycorner_core::singular_functions::{DomainConfig, SingularSeries};
use eddycorner_core::Error;
use num_complex::Complex64;
use serde::Serialize;

use crate::checks::{self, chain_defects, golden_deviation, sample_points};
use crate::config::{FieldSource, Method, RunConfig};
use crate::disk_problem::{self, References};
use crate::render::render_chain;

/// Exit code 1 for bad input, 2 for a failed numerical check.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Check(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(format!("i/o: {e}"))
    }
}

pub type Outcome = Result<(), Failure>;

fn kind_name(kind: ChainKind) -> &'static str {
    match kind {
        ChainKind::Primal => "primal",
        ChainKind::Dual => "dual",
    }
}

fn parities(cfg: &RunConfig, k: i32) -> Vec<u8> {
    let all = if cfg.p.is_empty() {
        vec![0, 1]
    } else {
        cfg.p.clone()
    };
    all.into_iter().filter(|&p| k > 0 || p == 0).collect()
}

pub fn shadows(cfg: &RunConfig) -> Outcome {
    let kind = cfg.kind.unwrap_or(ChainKind::Primal);
    let depth = cfg.depth.unwrap_or(1);
    let points = sample_points(cfg.seed, 64);
    let mut failures = Vec::new();
    for &k in &cfg.k {
        let chain = build_chain(k, kind, depth, cfg.omega)?;
        let stem = format!("shadows_{}_k{k}", kind_name(kind));
        cfg.write_json(&format!("{stem}.json"), &chain.to_json())?;
        let text: String = parities(cfg, k)
            .iter()
            .map(|&p| render_chain(&chain, p))
            .collect();
        cfg.write_text(&format!("{stem}.txt"), &text)?;
        print!("{text}");
        if !cfg.verify {
            continue;
        }
        let defects = chain_defects(&chain)?;
        println!(
            "verify {} k={k}: {} residual/degree defects",
            kind_name(kind),
            defects.len()
        );
        for d in &defects {
            println!("  {d}");
        }
        failures.extend(defects.into_iter().map(|d| format!("k={k} {d}")));
        if depth >= 1 {
            let dev = golden_deviation(&chain, &points)?;
            let ok = dev <= 1e-11;
            println!(
                "verify {} k={k}: first shadow vs real form, scaled deviation {dev:.2e} {}",
                kind_name(kind),
                if ok { "ok" } else { "FAILED" }
            );
            if !ok {
                failures.push(format!("k={k} golden deviation {dev:.2e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} verification failures",
            failures.len()
        )))
    }
}

fn radii(cfg: &RunConfig) -> Result<Vec<f64>, Failure> {
    let g = cfg
        .radii
        .ok_or_else(|| Failure::Usage("missing radius range".into()))?;
    Ok(geometric_grid(g.r_max, g.r_min, g.count)?)
}

fn thetas(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| -PI + 2.0 * PI * j as f64 / n as f64)
        .collect()
}

pub fn eval(cfg: &RunConfig) -> Outcome {
    let dom = cfg.domain()?;
    let kind = cfg.kind.unwrap_or(ChainKind::Primal);
    let m = cfg.m.first().copied().unwrap_or(1);
    let rs = radii(cfg)?;
    let ts = thetas(cfg.n_theta.unwrap_or(64));
    for &k in &cfg.k {
        for p in parities(cfg, k) {
            let series = match kind {
                ChainKind::Primal => SingularSeries::primal(k, p, m, &dom)?,
                ChainKind::Dual => SingularSeries::dual(k, p, m, &dom)?,
            };
            let mut body = String::from("r,theta,re,im\n");
            for &r in &rs {
                for &t in &ts {
                    let v = series.eval(r, t)?;
                    let _ = writeln!(body, "{r:e},{t:e},{:e},{:e}", v.re, v.im);
                }
            }
            let path = cfg.write_csv(
                &format!("eval_{}_k{k}_p{p}_m{m}.csv", kind_name(kind)),
                &body,
            )?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn disk_field(
    cfg: &RunConfig,
    dom: &DomainConfig,
) -> Result<eddycorner_solver::PolarField, Failure> {
    let d = cfg
        .disk
        .ok_or_else(|| Failure::Usage("missing solver grid".into()))?;
    Ok(disk_problem::solve(
        dom,
        d.r_domain,
        d.n_r,
        d.n_theta,
        d.r_min_rel,
    )?)
}

#[derive(Serialize)]
struct SolveSummary {
    center: Complex64,
    residual: f64,
    unknowns: usize,
}

pub fn solve(cfg: &RunConfig) -> Outcome {
    let dom = cfg.domain()?;
    let field = disk_field(cfg, &dom)?;
    let path = cfg.write_csv("field.csv", &field.to_csv())?;
    cfg.write_json(
        "solve.json",
        &SolveSummary {
            center: field.center,
            residual: field.residual,
            unknowns: field.grid.unknowns(),
        },
    )?;
    println!(
        "A(c) = {:.9}{:+.9}i, residual {:.1e}",
        field.center.re, field.center.im, field.residual
    );
    println!("{}", path.display());
    Ok(())
}

fn print_report(report: &ExtractionReport) {
    println!("{} (zeta = {:.6} 1/m)", report.method, report.zeta);
    for s in &report.series {
        let fit = match s.fit {
            SlopeFit::Exact => "exact".to_string(),
            SlopeFit::Fitted { slope, points } => format!("slope {slope:.3} from {points} radii"),
            SlopeFit::Insufficient { points } => format!("too few radii above rounding ({points})"),
        };
        let corrected = if s.corrected { ", corrected" } else { "" };
        println!(
            "  k={} p={}: expected {}, {fit}{corrected}",
            s.k, s.p, s.expected_slope
        );
    }
}

#[derive(Serialize)]
struct ExtractResult<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    references: Option<&'a References>,
    report: &'a ExtractionReport,
}

pub fn extract(cfg: &RunConfig) -> Outcome {
    let dom = cfg.domain()?;
    let grid = radii(cfg)?;
    let method = cfg.method.unwrap_or(Method::QuasiDual);
    let ps = if cfg.p.is_empty() {
        vec![0]
    } else {
        cfg.p.clone()
    };
    let k_max = cfg.k.iter().copied().max().unwrap_or(3);
    let (family, reference, refs): (Box<dyn CircleFamily>, Reference, Option<References>) =
        match cfg.source.unwrap_or(FieldSource::Manufactured) {
            FieldSource::Manufactured => {
                let field = ManufacturedField::new(dom, cfg.order.unwrap_or(3), &cfg.lambdas)?;
                (Box::new(field), Reference::Known(cfg.lambdas.clone()), None)
            }
            FieldSource::Solver => {
                let field = disk_field(cfg, &dom)?;
                let refs = References::compute(
                    &field,
                    &dom,
                    cfg.r_small.unwrap_or(disk_problem::R_SMALL),
                )?;
                for (k, raw, lambda) in &refs.functionals {
                    println!("R_small: J(K^{k},0_1, A) = {raw:.9}, Lambda^{k},0 = {lambda:.9}");
                }
                (Box::new(field), refs.reference(), Some(refs))
            }
        };
    let mut runs: Vec<(String, Box<dyn Extractor>)> = Vec::new();
    match method {
        Method::QuasiDual => {
            for &m in &cfg.m {
                for &p in &ps {
                    let top = k_max.min(2 * m as i32 + 1);
                    if top < i32::from(p) {
                        continue;
                    }
                    runs.push((
                        format!("quasidual_p{p}_m{m}"),
                        Box::new(QuasiDualSetup::new(dom, p, top, m)?),
                    ));
                }
            }
        }
        Method::Moments => {
            let variant = cfg
                .variant
                .unwrap_or(eddycorner_core::extraction::MomentVariant::N1TwoTerms);
            runs.push((
                format!("moments_{variant:?}"),
                Box::new(MomentSetup::new(dom, variant)?),
            ));
        }
    }
    for (stem, ex) in &runs {
        let report = convergence_study(ex.as_ref(), family.as_ref(), &reference, &grid)?;
        print_report(&report);
        if refs.is_some() {
            let (lo, hi) = checks::REGIME;
            for s in &report.series {
                if let Some((slope, n)) = disk_problem::regime_slope(s, dom.zeta, lo, hi) {
                    println!("  k={} p={}: error/model slope {slope:+.3} over {n} radii with zeta R in [{lo}, {hi}]", s.k, s.p);
                }
            }
        }
        cfg.write_csv(&format!("extract_{stem}.csv"), &report.to_csv())?;
        cfg.write_json(
            &format!("extract_{stem}.json"),
            &ExtractResult {
                references: refs.as_ref(),
                report: &report,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RingError {
    r: f64,
    /// Max over the ring of `|A - A_N| / |A(c)|` for N = 1, 2, 3.
    relative: Vec<f64>,
}

#[derive(Serialize)]
struct Reconstruction<'a> {
    references: &'a References,
    rings: Vec<RingError>,
}

pub fn reconstruct(cfg: &RunConfig) -> Outcome {
    let dom = cfg.domain()?;
    let field = disk_field(cfg, &dom)?;
    let refs = References::compute(&field, &dom, cfg.r_small.unwrap_or(disk_problem::R_SMALL))?;
    let top = cfg.order.unwrap_or(3);
    // Composite order N keeps every Lambda^{k,0} (i zeta^2)^j s^{k,0}_j with k + 2j <= N.
    let mut orders: Vec<Vec<(Complex64, SingularSeries)>> = Vec::new();
    for n in 1..=top {
        let mut terms = Vec::new();
        for k in 0..=n as i32 {
            let lambda = refs
                .lambda(k)
                .ok_or_else(|| Failure::Usage(format!("no extracted coefficient for k = {k}")))?;
            terms.push((
                lambda,
                SingularSeries::primal(k, 0, (n - k as usize) / 2, &dom)?,
            ));
        }
        orders.push(terms);
    }
    let g = cfg
        .radii
        .ok_or_else(|| Failure::Usage("missing radius range".into()))?;
    let stride = (field.grid.n_theta / cfg.n_theta.unwrap_or(128)).max(1);
    let scale = field.center.norm();
    let mut head = String::from("r,theta,solver_re,solver_im");
    for n in 1..=top {
        let _ = write!(head, ",order{n}_re,order{n}_im");
    }
    let mut body = head + "\n";
    let mut rings = Vec::new();
    for i in 0..=field.grid.n_r {
        let r = field.grid.r(i);
        if r < g.r_min || r > g.r_max {
            continue;
        }
        let mut worst = vec![0.0f64; top];
        for j in 0..field.grid.n_theta {
            let t = field.grid.theta(j);
            let a = field.at(i, j);
            let mut row = format!("{r:e},{t:e},{:e},{:e}", a.re, a.im);
            for (n, terms) in orders.iter().enumerate() {
                let v: Complex64 = terms
                    .iter()
                    .map(|(l, s)| Ok(l * s.eval(r, t)?))
                    .sum::<Result<_, Error>>()?;
                worst[n] = worst[n].max((a - v).norm() / scale);
                let _ = write!(row, ",{:e},{:e}", v.re, v.im);
            }
            if j % stride == 0 {
                body.push_str(&row);
                body.push('\n');
            }
        }
        rings.push(RingError { r, relative: worst });
    }
    let path = cfg.write_csv("reconstruct.csv", &body)?;
    let step = (rings.len() / 8).max(1);
    println!("max relative deviation from the solver field per ring:");
    for ring in rings.iter().step_by(step) {
        let cols: Vec<String> = ring
            .relative
            .iter()
            .enumerate()
            .map(|(n, e)| format!("order {}: {e:.2e}", n + 1))
            .collect();
        println!("  r = {:.3e} m  {}", ring.r, cols.join("  "));
    }
    cfg.write_json(
        "reconstruct.json",
        &Reconstruction {
            references: &refs,
            rings,
        },
    )?;
    println!("{}", path.display());
    Ok(())
}

pub fn verify_all(cfg: &RunConfig) -> Outcome {
    let outcomes = checks::all(cfg.seed);
    for o in &outcomes {
        println!("{}", o.line());
        for d in &o.details {
            println!("    {d}");
        }
    }
    cfg.write_json("verify.json", &outcomes)?;
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| o.criterion.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "criteria failing: {}",
            failed.join(", ")
        )))
    }
}
