use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game_model::FiniteTypeGame;
use crate::linalg::Vector;
use crate::vi_solver::project_coupled;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalModuli {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Pairs that entered each minimum.
    pub alpha_pairs: usize,
    pub beta_pairs: usize,
}

/// Random coupled-feasible profile: a uniform point of the bounding box,
/// projected onto the coupled set.
pub fn random_feasible(game: &FiniteTypeGame, rng: &mut impl Rng) -> Result<Vector> {
    let r = game.radius();
    let y = Vector::from_fn(game.stacked_dim(), |_, _| rng.gen_range(-r..=r));
    project_coupled(&y, game, 1e-12 * game.scale())
}

/// Smallest observed ratios of `Σμᵢ⟨gᵢ(x) − gᵢ(y), xᵢ − yᵢ⟩` to
/// `Σμᵢ‖xᵢ − yᵢ‖²` (alpha) and to `‖X − Y‖²` (beta) over seeded random pairs.
pub fn empirical_monotonicity(game: &FiniteTypeGame, samples: usize, seed: u64) -> Result<EmpiricalModuli> {
    if samples < 2 {
        return Err(Error::contract("at least two samples are needed"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = game.dim();
    let floor = 1e-20 * game.scale() * game.scale();
    let mut out = EmpiricalModuli {
        alpha_hat: f64::INFINITY,
        beta_hat: f64::INFINITY,
        alpha_pairs: 0,
        beta_pairs: 0,
    };
    for _ in 0..samples {
        let x = random_feasible(game, &mut rng)?;
        let y = random_feasible(game, &mut rng)?;
        let dg = game.gradients(&x) - game.gradients(&y);
        let dx = &x - &y;
        let mut num = 0.0;
        let mut den_alpha = 0.0;
        for (i, &m) in game.masses().iter().enumerate() {
            let blk = dx.rows(i * t, t);
            num += m * dg.rows(i * t, t).dot(&blk);
            den_alpha += m * blk.norm_squared();
        }
        let den_beta = (game.aggregate(&x) - game.aggregate(&y)).norm_squared();
        if den_alpha > floor {
            out.alpha_hat = out.alpha_hat.min(num / den_alpha);
            out.alpha_pairs += 1;
        }
        if den_beta > floor {
            out.beta_hat = out.beta_hat.min(num / den_beta);
            out.beta_pairs += 1;
        }
    }
    if out.alpha_pairs == 0 || out.beta_pairs == 0 {
        return Err(Error::DegenerateSamples(samples));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_model::{CostParams, PolytopeSet};
    use crate::linalg::Matrix;

    fn game(c: Matrix, s: Matrix) -> FiniteTypeGame {
        let set = PolytopeSet::hyperbox(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let cost = CostParams::new(c, Vector::zeros(2), s, Vector::zeros(2)).unwrap();
        FiniteTypeGame::new(
            vec![0.5, 0.5],
            vec![set.clone(), set],
            vec![cost.clone().into(), cost.into()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn identity_price_map() {
        let m = empirical_monotonicity(&game(Matrix::identity(2, 2), Matrix::zeros(2, 2)), 100, 1).unwrap();
        assert!(m.beta_hat >= 1.0 - 1e-9);
    }

    #[test]
    fn curvature_two() {
        let m = empirical_monotonicity(&game(Matrix::zeros(2, 2), Matrix::identity(2, 2) * 2.0), 100, 2)
            .unwrap();
        assert!(m.alpha_hat >= 2.0 - 1e-9);
    }

    #[test]
    fn skew_price_map_vanishes() {
        let skew = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let m = empirical_monotonicity(&game(skew, Matrix::zeros(2, 2)), 100, 3).unwrap();
        assert!(m.beta_hat.abs() <= 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = game(Matrix::identity(2, 2), Matrix::identity(2, 2));
        assert_eq!(
            empirical_monotonicity(&g, 50, 9).unwrap(),
            empirical_monotonicity(&g, 50, 9).unwrap()
        );
    }
}
