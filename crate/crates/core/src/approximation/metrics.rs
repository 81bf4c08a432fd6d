use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game_model::{FiniteTypeGame, PolytopeSet, TypeCharacteristic};
use crate::linalg::{self, Vector};
use crate::vi_solver::project_polytope;

use super::{Partition, Provenance};

/// Largest dimension for which Hausdorff distances are computed by vertex
/// enumeration; above it the Hoffman-type bound is used.
pub const EXACT_HAUSDORFF_MAX_DIM: usize = 4;

fn check_shapes(game: &FiniteTypeGame, tc: &TypeCharacteristic, partition: &Partition) -> Result<()> {
    crate::error::check_dim(game.num_types(), partition.len())?;
    crate::error::check_dim(tc.dim(), game.dim())?;
    let tpl = tc.template();
    for set in game.sets() {
        if set.p() != tpl.p() || set.q() != tpl.q() {
            return Err(Error::Unsupported(
                "metrics need action sets sharing the constraint matrices P and Q".into(),
            ));
        }
    }
    Ok(())
}

fn distance(x: &Vector, set: &PolytopeSet) -> Result<f64> {
    let p = project_polytope(x, set, 1e-12 * set.scale())?;
    Ok((x - p).norm())
}

/// Hausdorff distance between two polytopes, attained at a vertex of one of them.
fn hausdorff(a: &PolytopeSet, a_vertices: &[Vector], b: &PolytopeSet, b_vertices: &[Vector]) -> Result<f64> {
    let mut d: f64 = 0.0;
    for v in a_vertices {
        d = d.max(distance(v, b)?);
    }
    for v in b_vertices {
        d = d.max(distance(v, a)?);
    }
    Ok(d)
}

/// `δ̄ = maxᵢ sup_{θ∈Θᵢ} d_H(X_θ, Xᵢ)` with the supremum taken over the region probes.
///
/// For `T ≤ 4` every probe distance is exact (vertex enumeration plus
/// projections). Otherwise each is bounded by `C₀‖(b, e)_θ − (b, e)ᵢ‖` with
/// `C₀` from [`PolytopeSet::hoffman_estimate`].
pub fn compute_delta(
    game: &FiniteTypeGame,
    tc: &TypeCharacteristic,
    partition: &Partition,
) -> Result<(f64, Provenance)> {
    check_shapes(game, tc, partition)?;
    let tpl = tc.template();
    let q_rows = tpl.p().nrows();
    let exact = game.dim() <= EXACT_HAUSDORFF_MAX_DIM;
    let c0 = if exact { 0.0 } else { tpl.hoffman_estimate() };

    let per_type: Vec<f64> = game
        .sets()
        .par_iter()
        .zip(partition.regions.par_iter())
        .map(|(set, region)| -> Result<f64> {
            let rhs_i = set.rhs();
            let verts_i = if exact { set.vertices() } else { Vec::new() };
            let mut worst: f64 = 0.0;
            for &(piece, theta) in &region.probes {
                let rhs = tc.rhs_in_piece(piece, theta);
                if rhs == rhs_i {
                    continue;
                }
                let d = if exact {
                    let x_theta = tpl.with_rhs_unchecked(
                        rhs.rows(0, q_rows).into_owned(),
                        rhs.rows(q_rows, rhs.len() - q_rows).into_owned(),
                    );
                    let verts = x_theta.vertices();
                    hausdorff(&x_theta, &verts, set, &verts_i)?
                } else {
                    c0 * (&rhs - &rhs_i).norm()
                };
                worst = worst.max(d);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let delta = per_type.into_iter().fold(0.0, f64::max);
    let provenance = if exact {
        Provenance::Sampled
    } else {
        Provenance::UpperBound
    };
    Ok((delta, provenance))
}

/// `ε̄ = maxᵢ sup_{θ∈Θᵢ} sup_{(x,Y)∈M²} ‖∇₁fᵢ(x,Y) − ∇₁f_θ(x,Y)‖`.
///
/// The price map is shared, so the inner supremum is at most
/// `‖S_θ − Sᵢ‖₂(R+1)√T + ‖r_θ − rᵢ‖` on `M = [0, R+1]^T`.
pub fn compute_epsilon(
    game: &FiniteTypeGame,
    tc: &TypeCharacteristic,
    partition: &Partition,
) -> Result<(f64, Provenance)> {
    check_shapes(game, tc, partition)?;
    let m = (tc.radius() + 1.0) * (tc.dim() as f64).sqrt();
    let mut eps: f64 = 0.0;
    for (cost, region) in game.costs().iter().zip(&partition.regions) {
        let cp = cost.as_quadratic().ok_or_else(|| {
            Error::Unsupported("gradient distances need the quadratic cost family".into())
        })?;
        for &(piece, theta) in &region.probes {
            let (s, r) = tc.utility_in_piece(piece, theta);
            let d = linalg::spectral_norm(&(s - &cp.curvature)) * m + (r - &cp.utility_slope).norm();
            eps = eps.max(d);
        }
    }
    Ok((eps, Provenance::Sampled))
}
