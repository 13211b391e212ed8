use std::f64::consts::PI;

use eddycorner_core::singular_functions::DomainConfig;
use eddycorner_core::{Error, Result};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::Serialize;

use crate::grid::PolarGrid;

/// Relative residual the linear solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `-Lap A + 4 i zeta^2 chi A = chi f` in the disk, `A = g` on the rim.
pub struct PolarProblem<'a> {
    pub zeta: f64,
    pub grid: PolarGrid,
    pub dirichlet: &'a dyn Fn(f64) -> Complex64,
    /// Source restricted to the conductor; `None` for the homogeneous problem.
    pub conductor_source: Option<&'a dyn Fn(f64, f64) -> Complex64>,
}

/// Nodal solution. `values[i * n_theta + j]` for rings i = 0..=n_r, the last ring being the rim.
#[derive(Clone, Debug, Serialize)]
pub struct PolarField {
    pub grid: PolarGrid,
    pub zeta: f64,
    pub center: Complex64,
    pub values: Vec<Complex64>,
    pub residual: f64,
}

impl PolarField {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_theta + j]
    }

    /// `r, theta, re, im` rows, center first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,theta,re,im\n");
        out.push_str(&format!("0,0,{:e},{:e}\n", self.center.re, self.center.im));
        for i in 0..=self.grid.n_r {
            for j in 0..self.grid.n_theta {
                let v = self.at(i, j);
                out.push_str(&format!(
                    "{:e},{:e},{:e},{:e}\n",
                    self.grid.r(i),
                    self.grid.theta(j),
                    v.re,
                    v.im
                ));
            }
        }
        out
    }
}

/// The disk test problem with data `|theta| / (2 pi)`.
pub fn solve_disk(config: &DomainConfig, grid: PolarGrid) -> Result<PolarField> {
    if (grid.omega - config.omega).abs() > 1e-14 {
        return Err(Error::Invalid("grid and domain disagree on omega".into()));
    }
    let data = |t: f64| Complex64::new(t.abs() / (2.0 * PI), 0.0);
    solve_problem(&PolarProblem {
        zeta: config.zeta,
        grid,
        dirichlet: &data,
        conductor_source: None,
    })
}

fn idx(g: &PolarGrid, i: usize, j: usize) -> usize {
    i * g.n_theta + j
}

/// Assembles the scaled equations `-(A_ss + A_tt) + 4 i zeta^2 r^2 chi A = r^2 chi f`,
/// `s = log r`, on the interior rings. The ring below the first one is the center
/// value, which equals the mean of the first ring.
fn assemble(p: &PolarProblem) -> (Vec<Triplet<usize, usize, Complex64>>, Vec<Complex64>) {
    let g = &p.grid;
    let (nr, nt) = (g.n_r, g.n_theta);
    let center = nr * nt;
    let (ih2, it2) = (1.0 / (g.h() * g.h()), 1.0 / (g.dtheta() * g.dtheta()));
    let rim: Vec<Complex64> = (0..nt).map(|j| (p.dirichlet)(g.theta(j))).collect();
    let mut t = Vec::with_capacity(5 * nr * nt + 2 * nt + 1);
    let mut b = vec![Complex64::default(); nr * nt + 1];
    let iz = Complex64::new(0.0, 4.0 * p.zeta * p.zeta);
    for i in 0..nr {
        let r2 = g.r(i) * g.r(i);
        for j in 0..nt {
            let row = idx(g, i, j);
            let chi = g.chi(j);
            t.push(Triplet::new(
                row,
                row,
                Complex64::new(2.0 * ih2 + 2.0 * it2, 0.0) + iz * r2 * chi,
            ));
            let (jm, jp) = ((j + nt - 1) % nt, (j + 1) % nt);
            t.push(Triplet::new(row, idx(g, i, jm), Complex64::new(-it2, 0.0)));
            t.push(Triplet::new(row, idx(g, i, jp), Complex64::new(-it2, 0.0)));
            let below = if i == 0 { center } else { idx(g, i - 1, j) };
            t.push(Triplet::new(row, below, Complex64::new(-ih2, 0.0)));
            if i + 1 < nr {
                t.push(Triplet::new(
                    row,
                    idx(g, i + 1, j),
                    Complex64::new(-ih2, 0.0),
                ));
            } else {
                b[row] += ih2 * rim[j];
            }
            if let Some(f) = p.conductor_source {
                if chi > 0.0 {
                    b[row] += r2 * chi * f(g.r(i), g.theta(j));
                }
            }
        }
    }
    // Center row, scaled like the others.
    t.push(Triplet::new(center, center, Complex64::new(ih2, 0.0)));
    for j in 0..nt {
        t.push(Triplet::new(
            center,
            idx(g, 0, j),
            Complex64::new(-ih2 / nt as f64, 0.0),
        ));
    }
    (t, b)
}

fn residual_norm(
    a: &SparseColMat<usize, Complex64>,
    x: MatRef<Complex64>,
    b: &[Complex64],
) -> (Vec<Complex64>, f64) {
    let ax = a * x;
    let r: Vec<Complex64> = (0..b.len()).map(|k| b[k] - ax[(k, 0)]).collect();
    let nb = b
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let nr = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    (r, nr / nb)
}

pub fn solve_problem(p: &PolarProblem) -> Result<PolarField> {
    let g = p.grid;
    let n = g.unknowns();
    let (triplets, b) = assemble(p);
    let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::Numerical(format!("sparse LU failed: {e:?}")))?;
    let mut x = Mat::<Complex64>::from_fn(n, 1, |k, _| b[k]);
    {
        use faer::linalg::solvers::SolveCore;
        lu.solve_in_place_with_conj(faer::Conj::No, x.as_mut());
    }
    // A couple of refinement steps if rounding left the residual above tolerance.
    let (mut r, mut rel) = residual_norm(&a, x.as_ref(), &b);
    for _ in 0..3 {
        if rel <= RESIDUAL_TOL {
            break;
        }
        let mut d = Mat::<Complex64>::from_fn(n, 1, |k, _| r[k]);
        {
            use faer::linalg::solvers::SolveCore;
            lu.solve_in_place_with_conj(faer::Conj::No, d.as_mut());
        }
        x += &d;
        (r, rel) = residual_norm(&a, x.as_ref(), &b);
    }
    if !(rel <= RESIDUAL_TOL) {
        return Err(Error::Numerical(format!(
            "linear solve stalled at relative residual {rel:.3e}"
        )));
    }
    let nt = g.n_theta;
    let mut values: Vec<Complex64> = (0..g.n_r * nt).map(|k| x[(k, 0)]).collect();
    values.extend((0..nt).map(|j| (p.dirichlet)(g.theta(j))));
    Ok(PolarField {
        grid: g,
        zeta: p.zeta,
        center: x[(n - 1, 0)],
        values,
        residual: rel,
    })
}
