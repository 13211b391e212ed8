mod common;

use std::f64::consts::PI;

use common::structure::genform_violation;
use eddycorner_core::shadow_engine::{build_chain, ChainKind};

#[test]
fn primal_chains_fit_the_generic_form() {
    for omega in [PI / 4.0, 2.0 * PI / 3.0, 1.5 * PI] {
        for k in 0..=4 {
            let ch = build_chain(k, ChainKind::Primal, 4, omega).unwrap();
            for (j, pair) in ch.pairs.iter().enumerate() {
                if let Some(msg) = genform_violation(pair, k, j as u32) {
                    panic!("k={k} j={j} omega={omega}: {msg}");
                }
            }
        }
    }
}

#[test]
fn parity_of_real_and_imaginary_parts() {
    let omega = 2.0 * PI / 3.0;
    for k in 0..=4 {
        let ch = build_chain(k, ChainKind::Primal, 3, omega).unwrap();
        for pair in &ch.pairs {
            for t in [0.1, 0.3, 1.4, 2.9] {
                let a = pair.evaluate(0.6, t, omega).unwrap();
                let b = pair.evaluate(0.6, -t, omega).unwrap();
                let s = a.norm().max(1e-12);
                assert!((a.re - b.re).abs() < 1e-11 * s, "real part not even, k={k}");
                assert!(
                    (a.im + b.im).abs() < 1e-11 * s,
                    "imaginary part not odd, k={k}"
                );
            }
        }
    }
}
