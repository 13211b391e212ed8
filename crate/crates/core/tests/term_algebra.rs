use std::f64::consts::PI;

use eddycorner_core::term_algebra::{Ray, Sector, Term, TermSum, Wrt};
use num_complex::Complex64;
use proptest::prelude::*;

const OMEGA: f64 = 2.0;

fn term_strategy(sector: Sector) -> impl Strategy<Value = Term> {
    // One kind of logarithm per term, as everywhere in the shadow chains.
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        0..4i32,
        0..4i32,
        0..3u32,
        any::<bool>(),
    )
        .prop_map(move |(re, im, a, b, l, conj)| {
            let (q, s) = if conj { (0, l) } else { (l, 0) };
            Term::new(sector, Complex64::new(re, im), a, b, q, s)
        })
}

fn sum_strategy(sector: Sector) -> impl Strategy<Value = TermSum> {
    prop::collection::vec(term_strategy(sector), 0..6)
        .prop_map(move |v| TermSum::from_terms(sector, v).unwrap())
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #[test]
    fn record_round_trip(t in sum_strategy(Sector::Minus)) {
        let back = TermSum::from_records(Sector::Minus, &t.to_records()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn canonical_form_is_idempotent(t in sum_strategy(Sector::Plus)) {
        let again = TermSum::from_terms(Sector::Plus, t.terms().iter().copied()).unwrap();
        prop_assert_eq!(again, t);
    }

    #[test]
    fn restriction_agrees_with_evaluation(
        terms in prop::collection::vec((-2.0..2.0f64, 0..3u32, 0..3u32, 0..5i32), 1..5),
        r in 0.05..3.0f64,
    ) {
        // Homogeneous sums only: a + b = 3.
        let t = TermSum::from_terms(
            Sector::Minus,
            terms.iter().map(|&(c, q, s, a)| Term::new(Sector::Minus, Complex64::new(c, 0.5 * c), a.min(3), 3 - a.min(3), q, s)),
        ).unwrap();
        for ray in Ray::BOTH {
            let trace = t.restrict_to_ray(ray, OMEGA).unwrap();
            let direct = t.evaluate(r, ray.theta(OMEGA), OMEGA).unwrap();
            prop_assert!(close(trace.eval(r), direct, t.max_abs_coeff() * 100.0));
        }
    }

    #[test]
    fn antiderivative_inverts_derivative(t in sum_strategy(Sector::Minus)) {
        for wrt in [Wrt::Var, Wrt::ConjVar] {
            let back = t.antiderivative(wrt).unwrap().differentiate(wrt);
            let d = back.sub(&t).unwrap();
            prop_assert!(d.max_abs_coeff() <= 1e-12 * t.max_abs_coeff().max(1.0));
        }
    }

    #[test]
    fn product_evaluates_pointwise(
        x in sum_strategy(Sector::Plus),
        poly in prop::collection::vec((-2.0..2.0f64, 0..3i32, 0..3i32), 0..4),
        r in 0.1..2.0f64,
        t in 1.2..3.1f64,
    ) {
        // Log-free factor: products of log z and log zb are outside the algebra.
        let y = TermSum::from_terms(Sector::Plus, poly.iter().map(|&(c, a, b)| Term::new(Sector::Plus, Complex64::new(c, -c), a, b, 0, 0))).unwrap();
        let xy = x.mul(&y).unwrap();
        let lhs = xy.evaluate(r, t, OMEGA).unwrap();
        let rhs = x.evaluate(r, t, OMEGA).unwrap() * y.evaluate(r, t, OMEGA).unwrap();
        prop_assert!(close(lhs, rhs, lhs.norm() + rhs.norm()));
    }
}

#[test]
fn mixing_sectors_is_rejected() {
    let a = TermSum::monomial(Sector::Minus, 1.0, 1, 0, 0, 0);
    let b = TermSum::monomial(Sector::Plus, 1.0, 1, 0, 0, 0);
    assert!(a.add(&b).is_err());
}

#[test]
fn euler_and_angular_operators() {
    let t = TermSum::monomial(Sector::Minus, 1.0, 3, 1, 1, 0);
    let (r, th, h) = (0.7, 0.3, 1e-5);
    let f = |r: f64, th: f64| t.evaluate(r, th, OMEGA).unwrap();
    let er = (f(r + h, th) - f(r - h, th)) / (2.0 * h) * r;
    let et = (f(r, th + h) - f(r, th - h)) / (2.0 * h) * Complex64::new(0.0, -1.0);
    assert!(close(t.euler().evaluate(r, th, OMEGA).unwrap(), er, 1e4));
    assert!(close(t.angular().evaluate(r, th, OMEGA).unwrap(), et, 1e4));
}

#[test]
fn log_antiderivative() {
    // d/dz of log z is 1/z, and the primitive of 1/z is log z.
    let inv = TermSum::monomial(Sector::Minus, 1.0, -1, 0, 0, 0);
    let log = inv.antiderivative(Wrt::Var).unwrap();
    assert_eq!(log, TermSum::monomial(Sector::Minus, 1.0, 0, 0, 1, 0));
    // z^-1 log zb has no primitive in this class.
    assert!(TermSum::monomial(Sector::Minus, 1.0, -1, 0, 0, 1)
        .antiderivative(Wrt::Var)
        .is_err());
}

#[test]
fn plus_sector_uses_reflected_variable() {
    let t = TermSum::monomial(Sector::Plus, 1.0, 1, 0, 1, 0);
    let v = t.evaluate(2.0, PI, OMEGA).unwrap();
    assert!(close(v, Complex64::new(2.0 * 2f64.ln(), 0.0), 1.0));
    assert!(t.evaluate(2.0, 0.1, OMEGA).is_err());
}
