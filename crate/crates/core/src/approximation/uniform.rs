use crate::error::{Error, Result};
use crate::game_model::{FiniteTypeGame, PolytopeSet, TypeCharacteristic, TypeCost};

use super::{compute_delta, compute_epsilon, ApproxMetrics, ApproxOptions, Endpoint, Partition, Region};

const CUT_MERGE: f64 = 1e-12;

/// Uniform splitting: cut `[0, 1]` at `{k/ν}` and at the discontinuities of
/// the characteristic; each interval becomes one type with mass equal to its
/// length, sampled at `options.endpoint` from within its own continuity piece.
pub fn build_uniform_split(
    tc: &TypeCharacteristic,
    nu: usize,
    constraint: Option<PolytopeSet>,
    options: &ApproxOptions,
) -> Result<(FiniteTypeGame, ApproxMetrics)> {
    if nu == 0 {
        return Err(Error::contract("nu must be at least 1"));
    }
    if options.probes < 2 {
        return Err(Error::contract("at least two probes per interval are needed"));
    }
    let mut cuts: Vec<f64> = (0..=nu).map(|k| k as f64 / nu as f64).collect();
    cuts.extend(tc.discontinuities());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= CUT_MERGE);
    *cuts.last_mut().expect("cuts") = 1.0;

    let mut masses = Vec::new();
    let mut sets = Vec::new();
    let mut costs: Vec<TypeCost> = Vec::new();
    let mut regions = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = tc.piece_index(0.5 * (a + b));
        let theta = match options.endpoint {
            Endpoint::Left => a,
            Endpoint::Mid => 0.5 * (a + b),
            Endpoint::Right => b,
        };
        masses.push(b - a);
        sets.push(tc.set_in_piece(piece, theta)?);
        costs.push(tc.cost_in_piece(piece, theta).into());
        let probes = (0..options.probes)
            .map(|k| (piece, a + (b - a) * k as f64 / (options.probes - 1) as f64))
            .collect();
        regions.push(Region {
            intervals: vec![(a, b)],
            probes,
        });
    }
    let game = FiniteTypeGame::new(masses, sets, costs, constraint)?;
    let partition = Partition { regions };
    let (delta_bar, delta_provenance) = compute_delta(&game, tc, &partition)?;
    let (eps_bar, eps_provenance) = compute_epsilon(&game, tc, &partition)?;
    let metrics = ApproxMetrics {
        nu,
        num_types: game.num_types(),
        delta_bar,
        delta_provenance,
        eps_bar,
        eps_provenance,
        d: 0.0,
        partition,
    };
    Ok((game, metrics))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::game_model::CharacteristicPiece;
    use crate::linalg::{Matrix, Vector};

    fn linear(jump_at: Option<f64>) -> TypeCharacteristic {
        let template = PolytopeSet::interval(0.0, 1.0).unwrap();
        let piece = |start: f64, end: f64| CharacteristicPiece {
            start,
            end,
            rhs: Arc::new(|th| Vector::from_vec(vec![1.0 + th, 0.0])),
            utility: Arc::new(|th| (Matrix::identity(1, 1), Vector::from_vec(vec![th]))),
        };
        let pieces = match jump_at {
            None => vec![piece(0.0, 1.0)],
            Some(s) => vec![piece(0.0, s), piece(s, 1.0)],
        };
        TypeCharacteristic::new(&template, Matrix::identity(1, 1), Vector::zeros(1), pieces).unwrap()
    }

    #[test]
    fn four_equal_intervals() {
        let (game, metrics) =
            build_uniform_split(&linear(None), 4, None, &ApproxOptions::default()).unwrap();
        assert_eq!(game.num_types(), 4);
        for (i, m) in game.masses().iter().enumerate() {
            assert!((m - 0.25).abs() < 1e-15);
            let mid = 0.125 + 0.25 * i as f64;
            let r = game.costs()[i].as_quadratic().unwrap().utility_slope[0];
            assert!((r - mid).abs() < 1e-15);
        }
        // |θ − θ̄ᵢ| ≤ 1/8 for both the set bound and the slope
        assert!((metrics.delta_bar - 0.125).abs() < 1e-12);
        assert!((metrics.eps_bar - 0.125).abs() < 1e-12);
        assert_eq!(metrics.d, 0.0);
    }

    #[test]
    fn discontinuity_on_grid_is_merged() {
        let (game, _) =
            build_uniform_split(&linear(Some(0.5)), 2, None, &ApproxOptions::default()).unwrap();
        assert_eq!(game.num_types(), 2);
        let (game, metrics) =
            build_uniform_split(&linear(Some(0.3)), 2, None, &ApproxOptions::default()).unwrap();
        assert_eq!(game.num_types(), 3);
        assert_eq!(metrics.partition.breakpoints(), vec![0.0, 0.3, 0.5, 1.0]);
    }

    #[test]
    fn right_endpoints() {
        let opts = ApproxOptions {
            endpoint: Endpoint::Right,
            ..ApproxOptions::default()
        };
        let (game, _) = build_uniform_split(&linear(None), 2, None, &opts).unwrap();
        assert_eq!(game.sets()[0].b()[0], 1.5);
        assert_eq!(game.sets()[1].b()[0], 2.0);
    }

    #[test]
    fn nu_zero_is_rejected() {
        assert!(build_uniform_split(&linear(None), 0, None, &ApproxOptions::default()).is_err());
    }
}
