//! Finite-difference reference solver for the disk test problem: a conducting wedge
//! of opening omega inside a disk, Dirichlet data `|theta| / (2 pi)` on the rim.

mod circle;
mod grid;
mod solve;

pub use circle::GridCircle;
pub use grid::PolarGrid;
pub use solve::{solve_disk, solve_problem, PolarField, PolarProblem, RESIDUAL_TOL};
