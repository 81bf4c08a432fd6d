//! Extragradient solution of the finite-dimensional variational inequalities
//! characterizing symmetric Wardrop and variational Nash equilibria.

mod extragradient;
mod problem;
mod projection;

pub use extragradient::{solve, solve_svwe, solve_vne, vi_residual, SolveOptions, SolveReport};
pub use problem::{EquilibriumKind, ViProblem};
pub use projection::{project_coupled, project_polytope, ACTIVE_SET_LIMIT};
