//! Real-form rendering of shadow chains: `r^lambda log^n r` times sums of
//! `theta^l cos(f theta)` and `theta^l sin(f theta)` in each sector's own angle.

use std::collections::BTreeMap;
use std::fmt::Write;

use eddycorner_core::shadow_engine::{ChainKind, ShadowChain};
use eddycorner_core::singular_functions::Part;
use eddycorner_core::term_algebra::{AngularPiece, TermSum};

const DROP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Trig {
    Cos,
    Sin,
}

/// Real coefficients keyed by (theta power, frequency, trig).
fn real_terms(pieces: &[AngularPiece], part: Part) -> BTreeMap<(u32, i32, Trig), f64> {
    let mut out = BTreeMap::new();
    for p in pieces {
        let (f, flip) = if p.freq < 0 {
            (-p.freq, -1.0)
        } else {
            (p.freq, 1.0)
        };
        // part(c e^{i f phi}) = a cos(f phi) + b sin(f phi)
        let (a, b) = match part {
            Part::Re => (p.coeff.re, -p.coeff.im),
            Part::Im => (p.coeff.im, p.coeff.re),
            Part::NegIm => (-p.coeff.im, -p.coeff.re),
        };
        *out.entry((p.power, f, Trig::Cos)).or_insert(0.0) += a;
        if f != 0 {
            *out.entry((p.power, f, Trig::Sin)).or_insert(0.0) += flip * b;
        }
    }
    out
}

fn monomial(power: u32, f: i32, trig: Trig, angle: &str) -> String {
    let th = match power {
        0 => String::new(),
        1 => format!("{angle} "),
        l => format!("{angle}^{l} "),
    };
    match (f, trig) {
        (0, _) => {
            if power == 0 {
                "1".into()
            } else {
                th.trim_end().into()
            }
        }
        (1, Trig::Cos) => format!("{th}cos({angle})"),
        (1, Trig::Sin) => format!("{th}sin({angle})"),
        (f, Trig::Cos) => format!("{th}cos({f}{angle})"),
        (f, Trig::Sin) => format!("{th}sin({f}{angle})"),
    }
}

fn radial(lambda: i32, n: usize) -> String {
    let r = match lambda {
        0 => String::new(),
        1 => "r".into(),
        l => format!("r^{l}"),
    };
    let l = match n {
        0 => String::new(),
        1 => "log r".into(),
        n => format!("log^{n} r"),
    };
    match (r.is_empty(), l.is_empty()) {
        (true, true) => "1".into(),
        (false, false) => format!("{r} {l}"),
        _ => format!("{r}{l}"),
    }
}

fn render_sector(
    out: &mut String,
    sum: &TermSum,
    lambda: i32,
    part: Part,
    label: &str,
    angle: &str,
) {
    let scale = sum.max_abs_coeff().max(1.0);
    for (n, pieces) in sum.log_expansion().iter().enumerate() {
        let terms: Vec<String> = real_terms(pieces, part)
            .into_iter()
            .filter(|(_, c)| c.abs() > DROP * scale)
            .map(|((l, f, t), c)| format!("{c:+.12e} {}", monomial(l, f, t, angle)))
            .collect();
        if !terms.is_empty() {
            let _ = writeln!(
                out,
                "  {label} {:>12} : {}",
                radial(lambda, n),
                terms.join(" ")
            );
        }
    }
}

/// Text rendering of `part(u_j)` for every order of the chain.
pub fn render_chain(chain: &ShadowChain, p: u8) -> String {
    let part = Part::select(chain.kind, p);
    let name = match chain.kind {
        ChainKind::Primal => "s",
        ChainKind::Dual => "k",
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {name}^{{{},{p}}}_j, omega = {:.12}, part {part:?}",
        chain.k, chain.omega
    );
    for (j, pair) in chain.pairs.iter().enumerate() {
        let _ = writeln!(out, "j = {j}");
        render_sector(&mut out, &pair.minus, pair.homogeneity, part, "S-", "θ");
        render_sector(&mut out, &pair.plus, pair.homogeneity, part, "S+", "θ+");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use eddycorner_core::shadow_engine::build_chain;

    #[test]
    fn leading_terms() {
        let c = build_chain(0, ChainKind::Primal, 0, 1.0).unwrap();
        let s = render_chain(&c, 0);
        assert!(s.contains("S-            1 : +1.000000000000e0 1"), "{s}");
        let c = build_chain(2, ChainKind::Primal, 0, 1.0).unwrap();
        assert!(render_chain(&c, 1).contains("r^2 : +1.000000000000e0 sin(2θ)"));
        let c = build_chain(1, ChainKind::Primal, 1, 1.0).unwrap();
        let s = render_chain(&c, 0);
        assert!(s.contains("r^3 log r : "), "{s}");
    }
}
