//! Template of primal shadows: which monomials may appear and with what kind of coefficient.
#![allow(dead_code)]

use eddycorner_core::shadow_engine::SectorPair;
use eddycorner_core::term_algebra::TermSum;

fn term_fits(a: i32, b: i32, q: u32, s: u32, lambda: i32, j: u32) -> bool {
    if j == 0 {
        return (a, b, q, s) == (lambda, 0, 0, 0);
    }
    let n = q.max(s);
    if n == j {
        return (a, b, q, s) == (lambda, 0, j, 0) || (a, b, q, s) == (0, lambda, 0, j);
    }
    let room = (j - n) as i32;
    let z_log = s == 0 && (0..=room).contains(&b);
    let zb_log = q == 0 && (0..=room).contains(&a);
    n < j && (z_log || zb_log)
}

fn check_sum(t: &TermSum, lambda: i32, j: u32, tol: f64) -> Option<String> {
    for term in t.terms() {
        if !term_fits(term.a, term.b, term.q, term.s, lambda, j) {
            return Some(format!(
                "monomial ({}, {}, {}, {}) outside the template",
                term.a, term.b, term.q, term.s
            ));
        }
        if term.coeff.im.abs() > tol {
            return Some(format!(
                "complex coefficient {} on ({}, {}, {}, {})",
                term.coeff, term.a, term.b, term.q, term.s
            ));
        }
    }
    None
}

/// `None` if order `j` of the primal chain of `z^k` fits the generic form.
pub fn genform_violation(pair: &SectorPair, k: i32, j: u32) -> Option<String> {
    let lambda = k + 2 * j as i32;
    let tol = 1e-11 * pair.max_abs_coeff().max(1.0);
    if pair.homogeneity != lambda {
        return Some(format!(
            "homogeneity {} instead of {lambda}",
            pair.homogeneity
        ));
    }
    check_sum(&pair.minus, lambda, j, tol)
        .or_else(|| check_sum(&pair.plus, lambda, j, tol))
        .or_else(|| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let tops = [(lambda, 0, j, 0), (0, lambda, 0, j)];
            tops.iter().find_map(|&(a, b, q, s)| {
                let d = pair.plus.coeff_of(a, b, q, s) - pair.minus.coeff_of(a, b, q, s) * sign;
                (d.norm() > tol)
                    .then(|| format!("top coefficient mismatch on ({a}, {b}, {q}, {s})"))
            })
        })
}
