use eddycorner_core::shadow_engine::{
    first_shadow_of_log, first_shadow_of_power, leading_pair, next_shadow, transmission_jumps,
    ChainKind, SectorPair,
};
use eddycorner_core::term_algebra::{Sector, TermSum};

fn diff(a: &SectorPair, b: &SectorPair) -> f64 {
    a.sub(b).unwrap().max_abs_coeff()
}

fn power_source(k: i32) -> SectorPair {
    let mn = TermSum::monomial(Sector::Minus, 1.0, k, 0, 0, 0);
    SectorPair::new(mn, TermSum::zero(Sector::Plus), k).unwrap()
}

#[test]
fn closed_forms_satisfy_transmission() {
    for &omega in &[0.3, 1.0, std::f64::consts::FRAC_PI_4, 2.5, 4.0, 6.0] {
        for k in -4..6 {
            let u = first_shadow_of_power(k, omega).unwrap();
            let j = transmission_jumps(&u, omega).unwrap().max_abs();
            assert!(j < 1e-12, "k={k} omega={omega} jump={j}");
        }
        let u = first_shadow_of_log(omega).unwrap();
        assert!(transmission_jumps(&u, omega).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn engine_matches_closed_forms() {
    for &omega in &[0.3, 1.0, 2.5, 4.0, 6.0] {
        for k in -4..6 {
            let got = next_shadow(&power_source(k), omega).unwrap();
            let want = first_shadow_of_power(k, omega).unwrap();
            let d = diff(&got, &want);
            assert!(
                d < 1e-12,
                "k={k} omega={omega} diff={d}\n{}\n{}",
                got.minus,
                want.minus
            );
        }
        let got = next_shadow(&leading_pair(0, ChainKind::Dual).unwrap(), omega).unwrap();
        let want = first_shadow_of_log(omega).unwrap();
        assert!(diff(&got, &want) < 1e-12, "log omega={omega}");
    }
}
