//! The acceptance criteria as runnable checks. Each returns an outcome instead of
//! panicking so that expected failures can be reported alongside the passes.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use eddycorner_core::extraction::{
    convergence_study, coupling_coefficient, geometric_grid, ManufacturedField, MomentSetup,
    MomentVariant, QuasiDualSetup, Reference,
};
use eddycorner_core::shadow_engine::{
    build_chain, shadow_pde_residual, transmission_jumps, ChainKind, ShadowChain,
};
use eddycorner_core::singular_functions::DomainConfig;
use eddycorner_core::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::disk_problem::{self, least_squares_slope, References};
use crate::{real_forms, structure};

const EXACT: f64 = 1e-11;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub criterion: u8,
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        format!(
            "criterion {}: {status} ({:.2} s) {}",
            self.criterion, self.seconds, self.summary
        )
    }
}

fn timed(
    criterion: u8,
    limit: f64,
    f: impl FnOnce() -> Result<(bool, String, Vec<String>)>,
) -> Outcome {
    let t = Instant::now();
    let res = f();
    let seconds = t.elapsed().as_secs_f64();
    match res {
        Ok((pass, summary, mut details)) => {
            let in_time = seconds <= limit;
            if !in_time {
                details.push(format!("runtime {seconds:.2} s over the {limit} s budget"));
            }
            Outcome {
                criterion,
                pass: pass && in_time,
                summary,
                details,
                seconds,
            }
        }
        Err(e) => Outcome {
            criterion,
            pass: false,
            summary: format!("error: {e}"),
            details: Vec::new(),
            seconds,
        },
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

/// Points spread over both sectors and several decades of r.
pub fn sample_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (10f64.powf(rng.gen_range(-1.5..0.5)), rng.gen_range(-PI..PI)))
        .collect()
}

/// Largest scaled deviation of the first shadow from its hand-written real form.
pub fn golden_deviation(chain: &ShadowChain, points: &[(f64, f64)]) -> Result<f64> {
    let (k, w) = (chain.k, chain.omega);
    let u = &chain.pairs[1];
    let mut worst: f64 = 0.0;
    for &(r, t) in points {
        let v = u.evaluate(r, t, w)?;
        let l = 1.0 + r.ln().abs();
        let (dev, scale) = match chain.kind {
            ChainKind::Primal => {
                let odd = if k > 0 {
                    (v.im - real_forms::s1_odd(k, r, t, w)).abs()
                } else {
                    0.0
                };
                (
                    (v.re - real_forms::s1_even(k, r, t, w)).abs().max(odd),
                    r.powi(k + 2) * l,
                )
            }
            ChainKind::Dual => {
                let odd = if k > 0 {
                    (-v.im - real_forms::k1(k, 1, r, t, w)).abs()
                } else {
                    0.0
                };
                (
                    (v.re - real_forms::k1(k, 0, r, t, w)).abs().max(odd),
                    r.powi(2 - k) * l * l,
                )
            }
        };
        worst = worst.max(dev / scale);
    }
    Ok(worst)
}

/// Residual, transmission, degree-bound and template violations of a chain.
pub fn chain_defects(chain: &ShadowChain) -> Result<Vec<String>> {
    let w = chain.omega;
    let mut out = Vec::new();
    for j in 1..chain.pairs.len() {
        let p = &chain.pairs[j];
        let scale = p.max_abs_coeff().max(1.0);
        let pde = shadow_pde_residual(p, &chain.pairs[j - 1])?;
        if pde > EXACT * scale {
            out.push(format!("j={j}: shadow equation residual {pde:.2e}"));
        }
        let jump = transmission_jumps(p, w)?.max_abs();
        if jump > EXACT * scale {
            out.push(format!("j={j}: transmission jump {jump:.2e}"));
        }
        if p.log_degree() > chain.degree_bound(j) {
            out.push(format!(
                "j={j}: log degree {} above {}",
                p.log_degree(),
                chain.degree_bound(j)
            ));
        }
        if chain.kind == ChainKind::Primal {
            if let Some(v) = structure::genform_violation(p, chain.k, j as u32) {
                out.push(format!("j={j}: {v}"));
            }
        }
    }
    Ok(out)
}

/// First shadows against their real forms.
pub fn criterion_1(seed: u64) -> Outcome {
    timed(1, 1.0, || {
        let pts = sample_points(seed, 64);
        let mut worst: f64 = 0.0;
        let mut details = Vec::new();
        for w in [PI / 4.0, 2.0 * PI / 3.0] {
            for (kind, ks) in [(ChainKind::Primal, 0..=5), (ChainKind::Dual, 0..=3)] {
                for k in ks {
                    let d = golden_deviation(&build_chain(k, kind, 1, w)?, &pts)?;
                    worst = worst.max(d);
                    if d > EXACT {
                        details.push(format!("{kind:?} k={k} omega={w:.4}: deviation {d:.2e}"));
                    }
                }
            }
        }
        let summary = format!(
            "primal k<=5, dual k<=3 at 64 points: worst scaled deviation {worst:.1e} (tol 1e-11)"
        );
        Ok((worst <= EXACT, summary, details))
    })
}

/// Shadow equation, transmission, degree bounds and generic form over all chains.
pub fn criterion_2() -> Outcome {
    timed(2, 10.0, || {
        let mut details = Vec::new();
        let mut chains = 0;
        for w in [PI / 4.0, 2.0 * PI / 3.0, 1.0] {
            for kind in [ChainKind::Primal, ChainKind::Dual] {
                for k in 0..=4 {
                    let ch = build_chain(k, kind, 4, w)?;
                    chains += 1;
                    for d in chain_defects(&ch)? {
                        details.push(format!("{kind:?} k={k} omega={w:.4} {d}"));
                    }
                }
            }
        }
        let summary = format!("{chains} chains to J=4: {} defects", details.len());
        Ok((details.is_empty(), summary, details))
    })
}

/// Coupling coefficients at omega = pi/4, per unit zeta^2.
pub fn criterion_3() -> Outcome {
    timed(3, 10.0, || {
        let zeta = 1.0;
        let cfg = DomainConfig::new(PI / 4.0, zeta)?;
        let j20 = coupling_coefficient(2, 0, 1, &cfg)? / (zeta * zeta);
        let j31 = coupling_coefficient(3, 0, 1, &cfg)? / (zeta * zeta);
        let closed = 3.0 * SQRT_2 / (4.0 * PI) + 5.0 * SQRT_2 / 8.0;
        let published = (j20 - Complex64::new(0.0, 1.221502)).norm() / 1.221502;
        let cross = (j20 - Complex64::new(0.0, closed)).norm() / closed;
        let ok20 = published <= 1e-5 && cross <= 1e-10;
        let ok31 = j31.norm() <= 1e-6;
        let summary = format!(
            "J^(2,0;0,0) = {:.7}i zeta^2 {} (rel {published:.1e} to 1.221502, {cross:.1e} to closed form); \
             |J^(3,0;1,0)| = {:.6} zeta^2 {} (required <= 1e-6)",
            j20.im,
            mark(ok20),
            j31.norm(),
            mark(ok31)
        );
        let details = vec![format!("J^(3,0;1,0) = {j31} zeta^2")];
        Ok((ok20 && ok31, summary, details))
    })
}

/// `A = Lambda^{0,0} S^{0,0}_3 + Lambda^{1,0} S^{1,0}_3 + Lambda^{2,0} S^{2,0}_3`.
pub fn manufactured(zeta: f64, lambda10: f64) -> Result<ManufacturedField> {
    let cfg = DomainConfig::new(PI / 4.0, zeta)?;
    let coeffs = [
        (0, 0, Complex64::new(1.0, 0.0)),
        (1, 0, Complex64::new(lambda10, 0.0)),
        (2, 0, Complex64::new(-0.5, 0.0)),
    ];
    ManufacturedField::new(cfg, 3, &coeffs)
}

fn known(field: &ManufacturedField) -> Reference {
    Reference::Known((0..=2).map(|k| (k, 0, field.coefficient(k, 0))).collect())
}

/// Default radius sweep: twenty radii from 0.4 down to 1e-4 (domain radius 1).
pub fn unit_sweep() -> Result<Vec<f64>> {
    geometric_grid(0.4, 1e-4, 20)
}

/// Quasi-dual error slopes on the manufactured field.
pub fn criterion_4() -> Outcome {
    timed(4, 30.0, || {
        let field = manufactured(0.2, 2.0)?;
        let grid = unit_sweep()?;
        let mut parts = Vec::new();
        let mut pass = true;
        for (m, k_max) in [(0usize, 1), (1, 2)] {
            let setup = QuasiDualSetup::new(field.config, 0, k_max, m)?;
            let report = convergence_study(&setup, &field, &known(&field), &grid)?;
            for s in &report.series {
                let e = f64::from(s.expected_slope);
                let (txt, ok) = match s.fit.slope() {
                    Some(v) => (format!("{v:.2}"), (v - e).abs() <= 0.3),
                    None => (format!("{:?}", s.fit), false),
                };
                pass &= ok;
                parts.push(format!("(k={},m={m}) {txt}/{e} {}", s.k, mark(ok)));
            }
        }
        Ok((
            pass,
            format!("slopes fitted/expected: {}", parts.join(", ")),
            Vec::new(),
        ))
    })
}

/// Log-log slope of the pointwise ratio of two error series.
fn ratio_slope(num: &[(f64, f64)], den: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = num
        .iter()
        .zip(den)
        .map(|(a, b)| (a.0.ln(), (a.1 / b.1).ln()))
        .collect();
    least_squares_slope(&pts)
}

/// Moment estimators on the manufactured field.
pub fn criterion_5() -> Outcome {
    timed(5, 30.0, || {
        let grid = unit_sweep()?;
        let study = |field: &ManufacturedField, variant| -> Result<_> {
            let setup = MomentSetup::new(field.config, variant)?;
            convergence_study(&setup, field, &known(field), &grid)
        };
        let field = manufactured(0.2, 2.0)?;
        let one = study(&field, MomentVariant::N1OneTerm)?;
        let two = study(&field, MomentVariant::N1TwoTerms)?;
        let (s1, s2) = (
            one.series(0, 0).expect("k = 0 series"),
            two.series(0, 0).expect("k = 0 series"),
        );
        let slope1 = s1.fit.slope().unwrap_or(f64::NAN);
        let slope2 = s2.fit.slope().unwrap_or(f64::NAN);
        let ok1 = (slope1 - 2.0).abs() <= 0.3;
        let gain = s1
            .rows
            .iter()
            .zip(&s2.rows)
            .filter(|(a, _)| a.r < 0.05)
            .map(|(a, b)| a.err_abs / b.err_abs)
            .fold(f64::INFINITY, f64::min);
        let ok2 = slope2 > 2.6 && gain >= 10.0;
        let mut ratios = Vec::new();
        for lambda10 in [2.0, 0.0] {
            let field = manufactured(0.2, lambda10)?;
            let report = study(&field, MomentVariant::N3)?;
            let pick = |k| -> Vec<(f64, f64)> {
                report.series(k, 0).map_or(Vec::new(), |s| {
                    s.rows
                        .iter()
                        .filter(|r| r.used)
                        .map(|r| (r.r, r.err_abs))
                        .collect()
                })
            };
            let (e10, e00) = (pick(1), pick(0));
            let n = e10.len().min(e00.len());
            ratios.push(if n >= 6 {
                ratio_slope(&e10[..n], &e00[..n])
            } else {
                f64::NAN
            });
        }
        let ok3 = ratios.iter().all(|s| (s + 1.0).abs() <= 0.3);
        let summary = format!(
            "one-term slope {slope1:.2} {}; two-term slope {slope2:.2}, gain >= {gain:.0}x below R=0.05 {}; \
             N=3 Lambda^(1,0)/Lambda^(0,0) error ratio slope {:.2}, {:.2} (Lambda^(1,0) = 2, 0) {}",
            mark(ok1),
            mark(ok2),
            ratios[0],
            ratios[1],
            mark(ok3)
        );
        Ok((ok1 && ok2 && ok3, summary, Vec::new()))
    })
}

/// Outcome of the disk problem, kept for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct DiskRun {
    pub references: References,
    pub center_rel: f64,
    pub lambda00_rel: f64,
    pub functional_rel: [f64; 3],
    /// `(k, m, slope of error over model, points)` over the asymptotic decade.
    pub regimes: Vec<(i32, usize, f64, usize)>,
}

/// Window `zeta R in [0.05, 0.5]`: inside the asymptotic range, above the discretization floor.
pub const REGIME: (f64, f64) = (0.05, 0.5);
pub const REGIME_TOL: f64 = 0.5;

pub fn disk_run(n: usize) -> Result<DiskRun> {
    let zeta = disk_problem::zeta();
    let cfg = DomainConfig::new(disk_problem::OMEGA, zeta)?;
    let field = disk_problem::solve(&cfg, disk_problem::R_DOMAIN, n, n, disk_problem::R_MIN_REL)?;
    let refs = References::compute(&field, &cfg, disk_problem::R_SMALL)?;
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let functional_rel = [1, 2, 3].map(|k| {
        rel(
            refs.raw(k).unwrap_or_default(),
            disk_problem::FUNCTIONALS[k as usize - 1],
        )
    });
    let grid = geometric_grid(
        0.4 * disk_problem::R_DOMAIN,
        1e-4 * disk_problem::R_DOMAIN,
        20,
    )?;
    let mut regimes = Vec::new();
    for m in [0usize, 1] {
        let setup = QuasiDualSetup::new(cfg, 0, 1, m)?;
        let report = convergence_study(&setup, &field, &refs.reference(), &grid)?;
        for s in &report.series {
            let (slope, n) =
                disk_problem::regime_slope(s, zeta, REGIME.0, REGIME.1).unwrap_or((f64::NAN, 0));
            regimes.push((s.k, m, slope, n));
        }
    }
    Ok(DiskRun {
        center_rel: rel(field.center, disk_problem::CENTER),
        lambda00_rel: rel(refs.lambda(0).unwrap_or_default(), disk_problem::CENTER),
        functional_rel,
        regimes,
        references: refs,
    })
}

/// The disk problem against the published values.
pub fn criterion_6() -> Outcome {
    timed(6, 180.0, || {
        let run = disk_run(disk_problem::GRID)?;
        let [f1, f2, f3] = run.functional_rel;
        let ok_values = run.lambda00_rel <= 0.01 && f1 <= 0.02 && f2 <= 0.05 && f3 <= 0.05;
        let ok_regimes = run.regimes.iter().all(|r| r.2.abs() <= REGIME_TOL);
        let regimes: Vec<String> = run
            .regimes
            .iter()
            .map(|(k, m, s, _)| format!("(k={k},m={m}) {s:+.2}"))
            .collect();
        let summary = format!(
            "{0}x{0}: Lambda^(0,0) rel {1:.1e}, A(c) rel {2:.1e}, J1 rel {f1:.1e}, J2 rel {f2:.1e}, J3 rel {f3:.1e} {3}; \
             error/model slopes for zeta R in [0.05, 0.5]: {4} {5}",
            disk_problem::GRID,
            run.lambda00_rel,
            run.center_rel,
            mark(ok_values),
            regimes.join(", "),
            mark(ok_regimes)
        );
        let details = run
            .references
            .functionals
            .iter()
            .map(|(k, raw, l)| format!("k={k}: J = {raw}, Lambda = {l}"))
            .collect();
        Ok((ok_values && ok_regimes, summary, details))
    })
}

/// Largest error at zero frequency, over all series and radii, split by `k <= 1`.
fn zero_frequency_errors() -> Result<(f64, f64, bool)> {
    let cfg = DomainConfig::new(2.0 * PI / 3.0, 0.0)?;
    let coeffs = [
        (0, 0, Complex64::new(1.5, -0.5)),
        (1, 0, Complex64::new(2.0, 0.0)),
        (1, 1, Complex64::new(-0.7, 0.2)),
        (2, 0, Complex64::new(0.3, 0.0)),
        (3, 1, Complex64::new(0.0, 1.1)),
    ];
    let field = ManufacturedField::new(cfg, 0, &coeffs)?;
    let grid = unit_sweep()?;
    let reference = Reference::Known(coeffs.to_vec());
    let mut reports = Vec::new();
    for p in [0, 1] {
        reports.push(convergence_study(
            &QuasiDualSetup::new(cfg, p, 3, 1)?,
            &field,
            &reference,
            &grid,
        )?);
    }
    for variant in [
        MomentVariant::N1OneTerm,
        MomentVariant::N1TwoTerms,
        MomentVariant::N3,
    ] {
        reports.push(convergence_study(
            &MomentSetup::new(cfg, variant)?,
            &field,
            &reference,
            &grid,
        )?);
    }
    let (mut low, mut all, mut rounding) = (0f64, 0f64, true);
    for s in reports.iter().flat_map(|r| &r.series) {
        for row in &s.rows {
            all = all.max(row.err_abs);
            if s.k <= 1 {
                low = low.max(row.err_abs);
            }
            rounding &= row.err_abs < 1e-10 + 100.0 * row.noise_floor;
        }
    }
    Ok((low, all, rounding))
}

/// Exact recovery of harmonic polynomials at zero frequency.
pub fn criterion_7() -> Outcome {
    timed(7, 30.0, || {
        let (low, all, rounding) = zero_frequency_errors()?;
        let summary = format!(
            "max error k<=1 {low:.1e} {}; all k<=3 {all:.1e} {} (literal 1e-10); \
             all k within rounding amplified by R^-k: {}",
            mark(low <= 1e-10),
            mark(all <= 1e-10),
            mark(rounding)
        );
        Ok((all <= 1e-10, summary, Vec::new()))
    })
}

pub fn all(seed: u64) -> Vec<Outcome> {
    vec![
        criterion_1(seed),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ]
}
