//! Hand-transcribed real forms of the first shadows, used as independent oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

fn theta_plus(t: f64) -> f64 {
    if t > 0.0 {
        t - PI
    } else {
        t + PI
    }
}

fn in_minus(t: f64, w: f64) -> bool {
    t.abs() <= 0.5 * w
}

/// Even first shadow of `z^k` (any integer k other than -1, -2).
pub fn s1_even(k: i32, r: f64, t: f64, w: f64) -> f64 {
    let kf = f64::from(k);
    let c = ((kf + 1.0) * w.sin() + ((kf + 1.0) * w).sin()) / (PI * (kf + 1.0) * (kf + 2.0));
    let rk = r.powi(k + 2);
    let l = r.ln();
    let a2 = (kf + 2.0) * t;
    if in_minus(t, w) {
        c * rk * (l * a2.cos() - t * a2.sin())
            + rk * ((kf * t).cos() / (kf + 1.0) - w.cos() * a2.cos() / (kf + 2.0))
    } else {
        let tp = theta_plus(t);
        c * rk * (l * a2.cos() - tp * a2.sin())
            + rk * ((kf + 1.0) * w).cos() * a2.cos() / ((kf + 1.0) * (kf + 2.0))
    }
}

/// Odd first shadow of `z^k` (any integer k other than -1, -2).
pub fn s1_odd(k: i32, r: f64, t: f64, w: f64) -> f64 {
    let kf = f64::from(k);
    let c = ((kf + 1.0) * w.sin() - ((kf + 1.0) * w).sin()) / (PI * (kf + 1.0) * (kf + 2.0));
    let rk = r.powi(k + 2);
    let l = r.ln();
    let a2 = (kf + 2.0) * t;
    if in_minus(t, w) {
        c * rk * (l * a2.sin() + t * a2.cos())
            + rk * ((kf * t).sin() / (kf + 1.0) - w.cos() * a2.sin() / (kf + 2.0))
    } else {
        let tp = theta_plus(t);
        c * rk * (l * a2.sin() + tp * a2.cos())
            - rk * ((kf + 1.0) * w).cos() * a2.sin() / ((kf + 1.0) * (kf + 2.0))
    }
}

/// First dual shadow `k^{k,p}_1`, k >= 0 (p = 0 only for k = 0).
pub fn k1(k: i32, p: u8, r: f64, t: f64, w: f64) -> f64 {
    let (s, c) = w.sin_cos();
    let l = r.ln();
    let m = in_minus(t, w);
    let tp = theta_plus(t);
    match (k, p) {
        (0, 0) => {
            let v = if m {
                s / (2.0 * PI)
                    * r
                    * r
                    * ((2.0 * t).cos() * (l * l - t * t) - 2.0 * t * (2.0 * t).sin() * l)
                    + ((w - 2.0 * PI) * c - 2.0 * s) / (2.0 * PI)
                        * r
                        * r
                        * ((2.0 * t).cos() * l - t * (2.0 * t).sin())
                    + (c - PI * s) / 4.0 * r * r * (2.0 * t).cos()
                    + r * r * l
                    - r * r
            } else {
                s / (2.0 * PI)
                    * r
                    * r
                    * ((2.0 * t).cos() * (l * l - tp * tp) - 2.0 * tp * (2.0 * t).sin() * l)
                    + (w * c - 2.0 * s) / (2.0 * PI)
                        * r
                        * r
                        * ((2.0 * t).cos() * l - tp * (2.0 * t).sin())
                    - (3.0 * c + (2.0 * w - PI) * s) / 4.0 * r * r * (2.0 * t).cos()
            };
            v / (-2.0 * PI)
        }
        (1, 0) => {
            let v = if m {
                (s + w - PI) / PI * r * (l * t.cos() - t * t.sin()) - c * r * t.cos()
                    + r * (l * t.cos() + t * t.sin())
            } else {
                (s + w) / PI * r * (l * t.cos() - tp * t.sin()) - r * t.cos()
            };
            v / (2.0 * PI)
        }
        (2, 0) => {
            let b = (s + (2.0 * PI - w) * c) / PI;
            let v = if m {
                s / PI * (l * l - t * t) - b * l - (2.0 * t).cos()
            } else {
                s / PI * (l * l - tp * tp) - b * l - c + (PI - w) * s
            };
            v / (4.0 * PI)
        }
        (1, 1) => {
            let v = if m {
                (s - w + PI) / PI * r * (l * t.sin() + t * t.cos())
                    - c * r * t.sin()
                    - r * (l * t.sin() - t * t.cos())
            } else {
                (s - w) / PI * r * (l * t.sin() + tp * t.cos()) + r * t.sin()
            };
            v / (-2.0 * PI)
        }
        (2, 1) => {
            let v = if m {
                -(s + (2.0 * PI - w) * c) / PI * t + (2.0 * t).sin()
            } else {
                -(s - w * c) / PI * tp
            };
            v / (-4.0 * PI)
        }
        (k, 0) => s1_even(-k, r, t, w) / (2.0 * f64::from(k) * PI),
        (k, _) => -s1_odd(-k, r, t, w) / (2.0 * f64::from(k) * PI),
    }
}
