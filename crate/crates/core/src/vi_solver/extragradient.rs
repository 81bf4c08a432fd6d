use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::game_model::FiniteTypeGame;
use crate::linalg::Vector;

use super::problem::{EquilibriumKind, ViProblem};
use super::projection::project_coupled;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop once the natural-map residual is at most `tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Step as a fraction of `1/L_F`.
    pub step_fraction: f64,
    /// Halve the step whenever `τ‖F(x̄) − F(x)‖ > 0.95‖x̄ − x‖`.
    pub adaptive: bool,
    /// `None` starts from the projection of the origin, `Some(seed)` from the
    /// projection of a seeded uniform point of the bounding box.
    pub seed: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 1_000_000,
            step_fraction: 0.9,
            adaptive: false,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub kind: EquilibriumKind,
    pub x_hat: Vec<f64>,
    #[serde(rename = "X_hat")]
    pub aggregate: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: f64,
    pub step: f64,
    /// The profile is the unique solution (strongly monotone operator).
    pub unique_profile: bool,
    /// The aggregate is unique across all solutions.
    pub unique_aggregate: bool,
}

impl SolveReport {
    pub fn x_hat(&self) -> Vector {
        Vector::from_column_slice(&self.x_hat)
    }

    pub fn aggregate(&self) -> Vector {
        Vector::from_column_slice(&self.aggregate)
    }
}

/// Tolerance used for the inner projections of a solve.
fn projection_tol(game: &FiniteTypeGame, tol: f64, tau: f64) -> f64 {
    let scale = game.scale();
    (1e-3 * tol * tau).min(1e-12 * scale).max(1e-15 * scale)
}

/// Natural-map residual `‖x − Π(x − τF(x))‖/τ`; zero exactly at VI solutions.
pub fn vi_residual(x: &Vector, problem: &ViProblem<'_>, tau: f64) -> Result<f64> {
    let game = problem.game();
    let f = problem.operator(x);
    let p = project_coupled(&(x - &f * tau), game, projection_tol(game, 1e-8, tau))?;
    Ok((x - p).norm() / tau)
}

pub fn solve_svwe(game: &FiniteTypeGame, options: &SolveOptions) -> Result<SolveReport> {
    solve(&ViProblem::svwe(game)?, options)
}

pub fn solve_vne(game: &FiniteTypeGame, options: &SolveOptions) -> Result<SolveReport> {
    solve(&ViProblem::vne(game)?, options)
}

fn start_point(game: &FiniteTypeGame, seed: Option<u64>) -> Vector {
    match seed {
        None => Vector::zeros(game.stacked_dim()),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = game.radius();
            Vector::from_fn(game.stacked_dim(), |_, _| rng.gen_range(-r..=r))
        }
    }
}

/// Korpelevich extragradient:
/// `x̄ = Π(x − τF(x))`, `x⁺ = Π(x − τF(x̄))`.
pub fn solve(problem: &ViProblem<'_>, options: &SolveOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let game = problem.game();
    let lip = problem.lipschitz();
    let mut tau = if lip > 0.0 {
        options.step_fraction / lip
    } else {
        1.0
    };
    let mut ptol = projection_tol(game, options.tol, tau);

    let mut x = project_coupled(&start_point(game, options.seed), game, ptol)?;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iter {
        let fx = problem.operator(&x);
        let x_bar = project_coupled(&(&x - &fx * tau), game, ptol)?;
        residual = (&x - &x_bar).norm() / tau;
        if residual <= options.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let f_bar = problem.operator(&x_bar);
        if options.adaptive && tau * (&f_bar - &fx).norm() > 0.95 * (&x_bar - &x).norm() {
            tau *= 0.5;
            ptol = projection_tol(game, options.tol, tau);
            continue;
        }
        x = project_coupled(&(&x - &f_bar * tau), game, ptol)?;
    }

    let cert = problem.certificate();
    let aggregate = game.aggregate(&x);
    Ok(SolveReport {
        kind: problem.kind(),
        x_hat: x.iter().copied().collect(),
        aggregate: aggregate.iter().copied().collect(),
        residual,
        iterations,
        converged,
        wall_time: started.elapsed().as_secs_f64(),
        step: tau,
        unique_profile: cert.profile_unique(),
        unique_aggregate: cert.aggregate_unique(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_model::{CostParams, PolytopeSet};
    use crate::linalg::Matrix;

    fn scalar_game(d: f64) -> FiniteTypeGame {
        let set = PolytopeSet::interval(0.0, 1.0).unwrap();
        let cost = CostParams::pricing_only(Matrix::identity(1, 1), Vector::from_vec(vec![d])).unwrap();
        FiniteTypeGame::new(vec![1.0], vec![set], vec![cost.into()], None).unwrap()
    }

    #[test]
    fn boundary_solution() {
        let report = solve_svwe(&scalar_game(0.0), &SolveOptions::default()).unwrap();
        assert!(report.converged);
        assert!(report.x_hat[0].abs() < 1e-8);
    }

    #[test]
    fn interior_solution() {
        let opts = SolveOptions {
            seed: Some(3),
            ..SolveOptions::default()
        };
        let report = solve_svwe(&scalar_game(-0.5), &opts).unwrap();
        assert!(report.converged);
        assert!((report.x_hat[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn residual_matches_operator_norm_inside() {
        let game = scalar_game(-0.5);
        let problem = ViProblem::svwe(&game).unwrap();
        let x = Vector::from_vec(vec![0.7]);
        let r = vi_residual(&x, &problem, 0.01).unwrap();
        assert!((r - 0.2).abs() < 1e-9);
        let r = vi_residual(&Vector::from_vec(vec![0.5]), &problem, 0.5).unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn vne_single_player_is_monopoly() {
        // x·(x − 1) on [0, 1]: Wardrop solves x − 1 = 0 at the boundary x = 1,
        // the monopolist minimizes to x = 1/2
        let game = scalar_game(-1.0);
        let svwe = solve_svwe(&game, &SolveOptions::default()).unwrap();
        let vne = solve_vne(&game, &SolveOptions::default()).unwrap();
        assert!((svwe.x_hat[0] - 1.0).abs() < 1e-8);
        assert!((vne.x_hat[0] - 0.5).abs() < 1e-8);
    }
}
