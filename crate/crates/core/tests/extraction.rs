use std::f64::consts::{PI, SQRT_2};

use eddycorner_core::extraction::{
    convergence_study, coupling_between, coupling_coefficient, form_j, form_m, geometric_grid,
    FieldOnCircle, ManufacturedField, MomentSetup, MomentVariant, Provenance, QuasiDualSetup,
    Reference, SeriesCircle,
};
use eddycorner_core::singular_functions::{DomainConfig, SingularSeries};
use eddycorner_core::Result;
use num_complex::Complex64;

struct Constant(f64, Complex64);

impl FieldOnCircle for Constant {
    fn radius(&self) -> f64 {
        self.0
    }
    fn value(&self, _: f64) -> Result<Complex64> {
        Ok(self.1)
    }
    fn radial_derivative(&self, _: f64) -> Result<Complex64> {
        Ok(Complex64::default())
    }
    fn provenance(&self) -> Provenance {
        Provenance::Manufactured
    }
}

fn quarter() -> f64 {
    PI / 4.0
}

#[test]
fn moment_form_examples() {
    let w = 2.0 * PI / 3.0;
    let one = Constant(0.3, Complex64::new(1.0, 0.0));
    let m = form_m(|_| Ok(Complex64::new(1.0, 0.0)), &one, w).unwrap();
    assert!((m.value - 2.0 * PI).norm() < 1e-13);

    let cfg = DomainConfig::new(w, 0.0).unwrap();
    let r = 0.7;
    for (k, p) in [(1, 0), (1, 1), (2, 0), (3, 1)] {
        let dual = SingularSeries::dual(k, p, 0, &cfg).unwrap();
        for (l, q) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 1)] {
            let s = SingularSeries::primal(l, q, 0, &cfg).unwrap();
            let a = SeriesCircle { series: &s, r };
            let v = form_m(|t| dual.eval(r, t), &a, w).unwrap().value;
            let want = if (k, p) == (l, q) {
                1.0 / (2.0 * f64::from(k))
            } else {
                0.0
            };
            assert!((v - want).norm() < 1e-12, "M(k^{k},{p}, s^{l},{q}) = {v}");
        }
    }
    let s20 = SingularSeries::primal(2, 0, 0, &cfg).unwrap();
    let v = form_m(
        |_| Ok(Complex64::new(1.0, 0.0)),
        &SeriesCircle { series: &s20, r },
        w,
    )
    .unwrap();
    assert!(v.value.norm() < 1e-13);
}

#[test]
fn dual_form_examples() {
    let w = quarter();
    let cfg = DomainConfig::new(w, 0.0).unwrap();
    let k00 = SingularSeries::dual(0, 0, 0, &cfg).unwrap();
    let lambda = Complex64::new(0.3, -1.2);
    for r in [1e-3, 0.1, 2.0] {
        let j = form_j(&k00, &Constant(r, lambda)).unwrap().value;
        assert!((j - lambda).norm() < 1e-13);
    }
    for (k, p) in [(0, 0), (1, 0), (1, 1), (2, 0), (3, 1)] {
        let dual = SingularSeries::dual(k, p, 0, &cfg).unwrap();
        for (l, q) in [(0, 0), (1, 0), (1, 1), (2, 0), (3, 1)] {
            let s = SingularSeries::primal(l, q, 0, &cfg).unwrap();
            let vals: Vec<Complex64> = [0.05, 0.5]
                .iter()
                .map(|&r| {
                    form_j(&dual, &SeriesCircle { series: &s, r })
                        .unwrap()
                        .value
                })
                .collect();
            let want = if (k, p) == (l, q) { 1.0 } else { 0.0 };
            for v in &vals {
                assert!((v - want).norm() < 1e-10, "J(k^{k},{p}, s^{l},{q}) = {v}");
            }
        }
    }
}

#[test]
fn dual_form_tends_to_the_coupling() {
    let cfg = DomainConfig::new(quarter(), 1.0).unwrap();
    let k2 = SingularSeries::dual(2, 0, 1, &cfg).unwrap();
    let s0 = SingularSeries::primal(0, 0, 2, &cfg).unwrap();
    let target = Complex64::new(0.0, 1.221502095042099);
    let errs: Vec<f64> = [0.1, 0.05]
        .iter()
        .map(|&r| (form_j(&k2, &SeriesCircle { series: &s0, r }).unwrap().value - target).norm())
        .collect();
    assert!(errs[0] < 0.05 && errs[1] < errs[0] / 2.0, "{errs:?}");
}

#[test]
fn coupling_values() {
    let zeta = 0.8;
    let cfg = DomainConfig::new(quarter(), zeta).unwrap();
    let j20 = coupling_coefficient(2, 0, 1, &cfg).unwrap();
    let closed = zeta * zeta * (3.0 * SQRT_2 / (4.0 * PI) + 5.0 * SQRT_2 / 8.0);
    assert!((j20 - Complex64::new(0.0, closed)).norm() < 1e-10 * closed);
    assert!((closed / (zeta * zeta) - 1.221502).abs() < 1e-6);
    for (k, p, k2, p2) in [(2, 0, 0, 1), (3, 1, 1, 0), (2, 1, 1, 1), (3, 0, 2, 0)] {
        assert_eq!(
            coupling_between(k, p, k2, p2, &cfg).unwrap(),
            Complex64::default()
        );
    }
}

fn criterion_four_field(zeta: f64) -> ManufacturedField {
    let cfg = DomainConfig::new(quarter(), zeta).unwrap();
    let coeffs = [
        (0, 0, Complex64::new(1.0, 0.0)),
        (1, 0, Complex64::new(2.0, 0.0)),
        (2, 0, Complex64::new(-0.5, 0.0)),
    ];
    ManufacturedField::new(cfg, 3, &coeffs).unwrap()
}

fn known(field: &ManufacturedField) -> Reference {
    Reference::Known((0..=2).map(|k| (k, 0, field.coefficient(k, 0))).collect())
}

#[test]
fn quasi_dual_rates_on_manufactured_field() {
    let field = criterion_four_field(0.2);
    let grid = geometric_grid(0.4, 1e-4, 20).unwrap();
    for (m, k_max, cases) in [
        (0, 1, vec![(0, 2.0), (1, 1.0)]),
        (1, 2, vec![(0, 4.0), (1, 3.0), (2, 2.0)]),
    ] {
        let setup = QuasiDualSetup::new(field.config, 0, k_max, m).unwrap();
        let report = convergence_study(&setup, &field, &known(&field), &grid).unwrap();
        for (k, expected) in cases {
            let s = report.series(k, 0).unwrap();
            assert_eq!(f64::from(s.expected_slope), expected);
            let slope = s
                .fit
                .slope()
                .unwrap_or_else(|| panic!("m={m} k={k}: {:?}", s.fit));
            if (m, k) == (1, 0) {
                // The leading remainder changes sign near R = 1e-2, right where rounding
                // takes over; above it the error falls faster than the bound.
                assert!(slope > expected - 0.3, "m={m} k={k}: slope {slope}");
            } else {
                assert!(
                    (slope - expected).abs() <= 0.3,
                    "m={m} k={k}: slope {slope}, expected {expected}"
                );
            }
        }
    }
}

/// At order zeta^4 the full duality sum vanishes, so the remainder of `K^{0,0}_1` against
/// `S^{0,0}_3` is exactly minus the missing term `J(k_2, s_0)`.
#[test]
fn leading_quasi_dual_remainder() {
    let zeta = 0.2;
    let cfg = DomainConfig::new(quarter(), zeta).unwrap();
    let s3 = SingularSeries::primal(0, 0, 3, &cfg).unwrap();
    let s0 = SingularSeries::primal(0, 0, 0, &cfg).unwrap();
    let k1 = SingularSeries::dual(0, 0, 1, &cfg).unwrap();
    let k2 = SingularSeries::dual(0, 0, 2, &cfg).unwrap();
    for r in [0.4, 0.2, 0.1] {
        let err = form_j(&k1, &SeriesCircle { series: &s3, r }).unwrap().value - 1.0;
        let missing = form_j(&k2, &SeriesCircle { series: &s0, r }).unwrap().value
            - form_j(&k1, &SeriesCircle { series: &s0, r }).unwrap().value;
        // The zeta^6 terms are about (zeta r)^2 smaller.
        assert!(
            (err + missing).norm() < 0.1 * missing.norm(),
            "r = {r}: {err} vs {}",
            -missing
        );
    }
}

#[test]
fn moments_on_manufactured_field() {
    let field = criterion_four_field(0.2);
    let grid = geometric_grid(0.4, 1e-4, 20).unwrap();
    let study = |variant| {
        let setup = MomentSetup::new(field.config, variant).unwrap();
        convergence_study(&setup, &field, &known(&field), &grid).unwrap()
    };
    let one = study(MomentVariant::N1OneTerm);
    let two = study(MomentVariant::N1TwoTerms);
    let s1 = one.series(0, 0).unwrap();
    assert!((s1.fit.slope().unwrap() - 2.0).abs() <= 0.3, "{:?}", s1.fit);
    let s2 = two.series(0, 0).unwrap();
    assert!(s2.fit.slope().unwrap() > 2.6, "{:?}", s2.fit);
    for (a, b) in s1.rows.iter().zip(&s2.rows).filter(|(a, _)| a.r < 0.05) {
        assert!(
            b.err_abs < 0.1 * a.err_abs,
            "R = {}: {} vs {}",
            a.r,
            b.err_abs,
            a.err_abs
        );
    }
}

/// Log-log slope of the pointwise ratio of two error series.
fn ratio_slope(num: &[(f64, f64)], den: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = num
        .iter()
        .zip(den)
        .map(|(a, b)| (a.0.ln(), (a.1 / b.1).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}

#[test]
fn n3_first_order_coefficient_degrades() {
    let grid = geometric_grid(0.4, 1e-4, 20).unwrap();
    for lambda10 in [2.0, 0.0] {
        let cfg = DomainConfig::new(quarter(), 0.2).unwrap();
        let coeffs = [
            (0, 0, Complex64::new(1.0, 0.0)),
            (1, 0, Complex64::new(lambda10, 0.0)),
            (2, 0, Complex64::new(-0.5, 0.0)),
        ];
        let field = ManufacturedField::new(cfg, 3, &coeffs).unwrap();
        let setup = MomentSetup::new(cfg, MomentVariant::N3).unwrap();
        let report = convergence_study(&setup, &field, &known(&field), &grid).unwrap();
        let pick = |k| -> Vec<(f64, f64)> {
            report
                .series(k, 0)
                .unwrap()
                .rows
                .iter()
                .filter(|r| r.used)
                .map(|r| (r.r, r.err_abs))
                .collect()
        };
        let (e10, e00) = (pick(1), pick(0));
        let n = e10.len().min(e00.len());
        assert!(n >= 6);
        // The first-order estimate loses one power of R against the zeroth-order one.
        let s = ratio_slope(&e10[..n], &e00[..n]);
        assert!(
            (s + 1.0).abs() < 0.3,
            "lambda10 = {lambda10}: ratio slope {s}"
        );
    }
}

#[test]
fn zero_frequency_is_exact() {
    let cfg = DomainConfig::new(2.0 * PI / 3.0, 0.0).unwrap();
    let coeffs = [
        (0, 0, Complex64::new(1.5, -0.5)),
        (1, 0, Complex64::new(2.0, 0.0)),
        (1, 1, Complex64::new(-0.7, 0.2)),
        (2, 0, Complex64::new(0.3, 0.0)),
        (3, 1, Complex64::new(0.0, 1.1)),
    ];
    let field = ManufacturedField::new(cfg, 0, &coeffs).unwrap();
    let grid = geometric_grid(0.4, 1e-4, 12).unwrap();
    let reference = Reference::Known(coeffs.to_vec());
    for p in [0, 1] {
        let setup = QuasiDualSetup::new(cfg, p, 3, 1).unwrap();
        let report = convergence_study(&setup, &field, &reference, &grid).unwrap();
        for s in &report.series {
            // R^-k amplifies the rounding of the lower coefficients; nothing else may remain.
            assert!(
                s.rows
                    .iter()
                    .all(|r| r.err_abs < 1e-10 + 100.0 * r.noise_floor),
                "p={p} k={}",
                s.k
            );
        }
    }
    for variant in [
        MomentVariant::N1OneTerm,
        MomentVariant::N1TwoTerms,
        MomentVariant::N3,
    ] {
        let setup = MomentSetup::new(cfg, variant).unwrap();
        let report = convergence_study(&setup, &field, &reference, &grid).unwrap();
        for s in &report.series {
            assert!(
                s.rows
                    .iter()
                    .all(|r| r.err_abs < 1e-10 + 100.0 * r.noise_floor),
                "{variant:?} k={}",
                s.k
            );
        }
    }
}
