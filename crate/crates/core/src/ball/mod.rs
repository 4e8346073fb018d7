//! Dirichlet problem for `Δ_α` on a ball: kernels, exit-time Monte Carlo,
//! the steady-state fixed-point solver and the moving-planes diagnostic.

mod exit;
mod kernels;
mod solver;
mod symmetry;

pub use exit::*;
pub use kernels::*;
pub use solver::*;
pub use symmetry::*;
