//! Constants, error bounds and convergence rows for approximating sequences.

mod bounds;
mod constants;
mod empirical;

pub use bounds::{
    bounds_with_lambda, lambda_bar, omega, theoretical_bounds, BoundConstants, ConvergenceRow,
    OmegaVariant, TheoreticalBounds,
};
pub use constants::{compute_lf, compute_lf_characteristic, estimate_rho, estimate_rho_characteristic, RhoEstimate};
pub use empirical::{empirical_monotonicity, random_feasible, EmpiricalModuli};
