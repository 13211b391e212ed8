use std::f64::consts::PI;

use eddycorner_core::shadow_engine::{build_chain, ChainKind};
use eddycorner_core::singular_functions::{angular_decompose, DomainConfig, SingularSeries};
use num_complex::Complex64;

const THETAS: [f64; 6] = [0.0, 0.2, -0.35, 1.0, 2.4, -3.0];

fn table(
    k: i32,
    kind: ChainKind,
    p: u8,
    omega: f64,
) -> eddycorner_core::singular_functions::AngularTable {
    angular_decompose(&build_chain(k, kind, 2, omega).unwrap(), p).unwrap()
}

#[test]
fn first_primal_angular_functions() {
    for omega in [PI / 4.0, 2.0 * PI / 3.0, 4.5] {
        let (s, c) = omega.sin_cos();
        let t = table(0, ChainKind::Primal, 0, omega);
        let log_part = t.get(1, 1).unwrap();
        let free = t.get(1, 0).unwrap();
        for th in THETAS {
            assert!((log_part.eval(th) - s / PI * (2.0 * th).cos()).abs() < 1e-13);
            if th.abs() <= 0.5 * omega {
                let want = 1.0 - 0.5 * c * (2.0 * th).cos() - s / PI * th * (2.0 * th).sin();
                assert!(
                    (free.eval(th) - want).abs() < 1e-13,
                    "theta {th} omega {omega}"
                );
            }
        }
    }
}

#[test]
fn first_dual_angular_functions() {
    for omega in [PI / 4.0, 2.0 * PI / 3.0, 4.5] {
        let t = table(2, ChainKind::Dual, 0, omega);
        let lead = t.get(0, 0).unwrap();
        let log1 = t.get(1, 1).unwrap();
        let want = -(omega.sin() + (2.0 * PI - omega) * omega.cos()) / (4.0 * PI * PI);
        for th in THETAS {
            assert!((lead.eval(th) - (2.0 * th).cos() / (4.0 * PI)).abs() < 1e-14);
            assert!(
                (log1.eval(th) - want).abs() < 1e-13,
                "theta {th} omega {omega}"
            );
        }
    }
}

#[test]
fn reassembly_reproduces_the_series() {
    let cfg = DomainConfig::new(2.0 * PI / 3.0, 1.7).unwrap();
    for (kind, k, p) in [
        (ChainKind::Primal, 0, 0),
        (ChainKind::Primal, 3, 1),
        (ChainKind::Dual, 2, 0),
        (ChainKind::Dual, 1, 1),
    ] {
        let series = match kind {
            ChainKind::Primal => SingularSeries::primal(k, p, 3, &cfg),
            ChainKind::Dual => SingularSeries::dual(k, p, 3, &cfg),
        }
        .unwrap();
        let tab = series.angular_table().unwrap();
        for r in [0.03, 0.4, 1.3] {
            for th in THETAS {
                let a = series.eval(r, th).unwrap();
                let b = tab.reassemble(3, cfg.zeta, r, th).unwrap();
                assert!(
                    (a - b).norm() <= 1e-12 * a.norm().max(r.powi(-k)),
                    "{kind:?} k={k} r={r} th={th}"
                );
            }
        }
    }
}

#[test]
fn radial_derivative_matches_difference_quotient() {
    let cfg = DomainConfig::new(PI / 4.0, 2.0).unwrap();
    for s in [
        SingularSeries::primal(1, 0, 3, &cfg).unwrap(),
        SingularSeries::dual(2, 1, 2, &cfg).unwrap(),
    ] {
        for th in THETAS {
            let (r, h) = (0.3, 1e-6);
            let fd = (s.eval(r + h, th).unwrap() - s.eval(r - h, th).unwrap()) / (2.0 * h);
            let d = s.eval_dr(r, th).unwrap();
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
        }
    }
}

#[test]
fn zero_frequency_keeps_only_the_leading_term() {
    let cfg = DomainConfig::new(1.3, 0.0).unwrap();
    let s = SingularSeries::primal(2, 1, 4, &cfg).unwrap();
    for th in THETAS {
        let r = 0.8f64;
        let want = r * r * (2.0 * th).sin();
        assert!((s.eval(r, th).unwrap() - Complex64::new(want, 0.0)).norm() < 1e-14);
    }
}

/// Away from the seams the truncated series solves the PDE up to its last shadow:
/// `Lap S - 4 i zeta^2 S = -4 (i zeta^2)^{m+1} part(V_m)` in the conductor, `Lap S = 0` outside.
#[test]
fn truncated_series_residual() {
    let omega = 2.0 * PI / 3.0;
    let zeta = 1.5;
    let m = 2;
    let cfg = DomainConfig::new(omega, zeta).unwrap();
    let s = SingularSeries::primal(1, 0, m, &cfg).unwrap();
    let top = SingularSeries::new(
        build_chain(1, ChainKind::Primal, m, omega).unwrap(),
        0,
        m,
        0.0,
    )
    .unwrap();
    let iz2 = Complex64::new(0.0, zeta * zeta);
    let h = 1e-4;
    for (r, th) in [(0.5, 0.3), (0.7, 2.0), (0.4, -1.5)] {
        let f = |r: f64, t: f64| s.eval(r, t).unwrap();
        let frr = (f(r + h, th) - 2.0 * f(r, th) + f(r - h, th)) / (h * h);
        let fr = (f(r + h, th) - f(r - h, th)) / (2.0 * h);
        let ftt = (f(r, th + h) - 2.0 * f(r, th) + f(r, th - h)) / (h * h);
        let lap = frr + fr / r + ftt / (r * r);
        let (got, want) = if th.abs() < 0.5 * omega {
            let vm = top.chain().pairs[m].evaluate(r, th, omega).unwrap().re;
            (
                lap - 4.0 * iz2 * f(r, th),
                -4.0 * iz2.powi(m as i32 + 1) * vm,
            )
        } else {
            (lap, Complex64::default())
        };
        assert!(
            (got - want).norm() < 1e-5 * (1.0 + want.norm()),
            "r={r} th={th}: {got} vs {want}"
        );
    }
}
