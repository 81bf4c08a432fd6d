use serde::Serialize;

use crate::approximation::{build_uniform_split, ApproxOptions};
use crate::error::{Error, Result};
use crate::game_model::{FiniteTypeGame, PolytopeSet, TypeCharacteristic, TypeCost};
use crate::linalg::{self, Matrix};
use crate::lp::{LinearProgram, LpRow, Relation};

/// `L_f ≥ sup_{(x,Y)∈M²} ‖C Y + d − r + S x‖` on `M = [0, R+1]^T`:
/// `‖C‖₂(R+1)√T + ‖d‖ + maxᵢ(‖rᵢ‖ + ‖Sᵢ‖₂(R+1)√T)`.
pub fn compute_lf(game: &FiniteTypeGame) -> Result<f64> {
    let m = (game.radius() + 1.0) * (game.dim() as f64).sqrt();
    let mut own: f64 = 0.0;
    for cost in game.costs() {
        let TypeCost::Quadratic(cp) = cost else {
            return Err(Error::Unsupported(
                "L_f is analytic only for the quadratic cost family".into(),
            ));
        };
        own = own.max(cp.utility_slope.norm() + linalg::spectral_norm(&cp.curvature) * m);
    }
    let (c, d) = game.price_map().expect("quadratic game has a price map");
    Ok(linalg::spectral_norm(c) * m + d.norm() + own)
}

/// [`compute_lf`] for a characteristic, with the maximum over types replaced
/// by the maximum over `samples` points of every continuity piece.
pub fn compute_lf_characteristic(tc: &TypeCharacteristic, samples: usize) -> f64 {
    let m = (tc.radius() + 1.0) * (tc.dim() as f64).sqrt();
    let mut own: f64 = 0.0;
    for (k, piece) in tc.pieces().iter().enumerate() {
        for j in 0..samples.max(2) {
            let theta = piece.start + (piece.end - piece.start) * j as f64 / (samples.max(2) - 1) as f64;
            let (s, r) = tc.utility_in_piece(k, theta);
            own = own.max(r.norm() + linalg::spectral_norm(&s) * m);
        }
    }
    linalg::spectral_norm(tc.price_slope()) * m + tc.base_price().norm() + own
}

/// Interior margins of the feasible geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoEstimate {
    /// A third of the smallest per-type Chebyshev radius (within the affine hulls).
    pub rho0: f64,
    /// A third of the margin of the witness aggregate inside `Y ∩ A`.
    #[serde(rename = "rhoY")]
    pub rho_y: f64,
    pub rho_min: f64,
    #[serde(rename = "K_A")]
    pub k_a: f64,
}

impl RhoEstimate {
    fn new(rho0: f64, rho_y: f64, radius: f64) -> Result<Self> {
        let rho_min = rho0.min(rho_y);
        if !(rho_min > 0.0) {
            return Err(Error::DegenerateInterior(
                "the feasible set has no interior margin".into(),
            ));
        }
        Ok(RhoEstimate {
            rho0,
            rho_y,
            rho_min,
            k_a: (radius + 1.0) / rho_min,
        })
    }
}

fn shared_directions(sets: &[PolytopeSet]) -> Result<Matrix> {
    let first = &sets[0];
    if sets.iter().any(|s| s.q() != first.q()) {
        return Err(Error::Unsupported(
            "interior margins need action sets sharing the equality matrix Q".into(),
        ));
    }
    Ok(first.hull_directions())
}

/// Largest `t` such that some profile `z` has a ball of radius `t` (within
/// the affine hull) inside every `Xᵢ` and, around `Σμᵢzᵢ`, inside `A`.
fn joint_margin(game: &FiniteTypeGame, a: &PolytopeSet) -> Result<f64> {
    let t = game.dim();
    let n = game.stacked_dim();
    let dirs = shared_directions(game.sets())?;
    let mut stacked_q = Matrix::zeros(game.sets()[0].q().nrows() + a.q().nrows(), t);
    stacked_q
        .rows_mut(0, game.sets()[0].q().nrows())
        .copy_from(game.sets()[0].q());
    stacked_q
        .rows_mut(game.sets()[0].q().nrows(), a.q().nrows())
        .copy_from(a.q());
    let dirs_a = linalg::null_space(&stacked_q, t);
    if dirs.ncols() == 0 || dirs_a.ncols() == 0 {
        return Err(Error::DegenerateInterior(
            "the coupled feasible set is a single point".into(),
        ));
    }

    let mut lp = LinearProgram::new(n + 1);
    lp.bounds[n] = (0.0, f64::INFINITY);
    for (i, set) in game.sets().iter().enumerate() {
        for k in 0..set.p().nrows() {
            let row = linalg::row(set.p(), k);
            let mut coeffs: Vec<(usize, f64)> = (0..t).map(|j| (i * t + j, row[j])).collect();
            coeffs.push((n, linalg::projected_norm(&row, &dirs)));
            lp.push(LpRow {
                coeffs,
                relation: Relation::Le,
                rhs: set.b()[k],
            });
        }
        for k in 0..set.q().nrows() {
            let coeffs = (0..t).map(|j| (i * t + j, set.q()[(k, j)])).collect();
            lp.push(LpRow {
                coeffs,
                relation: Relation::Eq,
                rhs: set.e()[k],
            });
        }
    }
    let aggregated = |row: &[f64]| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (i, &m) in game.masses().iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    out.push((i * t + j, m * c));
                }
            }
        }
        out
    };
    for k in 0..a.p().nrows() {
        let row = linalg::row(a.p(), k);
        let mut coeffs = aggregated(row.as_slice());
        coeffs.push((n, linalg::projected_norm(&row, &dirs_a)));
        lp.push(LpRow {
            coeffs,
            relation: Relation::Le,
            rhs: a.b()[k],
        });
    }
    for k in 0..a.q().nrows() {
        let row = linalg::row(a.q(), k);
        lp.push(LpRow {
            coeffs: aggregated(row.as_slice()),
            relation: Relation::Eq,
            rhs: a.e()[k],
        });
    }
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    Ok(lp.maximize(&obj)?[n])
}

/// Margins of a finite-type game. Without an aggregate constraint the witness
/// is the profile of Chebyshev centers and `rhoY = Σμᵢrᵢ/3`; with one, `rhoY`
/// comes from a joint LP over the witness profile and its aggregate.
pub fn estimate_rho(game: &FiniteTypeGame) -> Result<RhoEstimate> {
    let mut radii = Vec::with_capacity(game.num_types());
    for set in game.sets() {
        radii.push(set.chebyshev()?.1);
    }
    let rho0 = radii.iter().copied().fold(f64::INFINITY, f64::min) / 3.0;
    let rho_y = match game.constraint() {
        None => {
            shared_directions(game.sets())?;
            radii.iter().zip(game.masses()).map(|(r, m)| r * m).sum::<f64>() / 3.0
        }
        Some(a) => joint_margin(game, a)? / 3.0,
    };
    RhoEstimate::new(rho0, rho_y, game.radius())
}

/// Margins of the continuum game: `rho0` from the Chebyshev radii of `X_θ` at
/// `samples` midpoints `θⱼ = (j + ½)/samples`, `rhoY` from a proxy uniform
/// split with `samples` types.
pub fn estimate_rho_characteristic(
    tc: &TypeCharacteristic,
    constraint: Option<&PolytopeSet>,
    samples: usize,
) -> Result<RhoEstimate> {
    if samples == 0 {
        return Err(Error::contract("samples must be positive"));
    }
    let mut min_r = f64::INFINITY;
    let mut mean_r = 0.0;
    for j in 0..samples {
        let theta = (j as f64 + 0.5) / samples as f64;
        let r = tc.set_at(theta)?.chebyshev()?.1;
        min_r = min_r.min(r);
        mean_r += r / samples as f64;
    }
    let rho_y = match constraint {
        None => mean_r / 3.0,
        Some(a) => {
            let (proxy, _) = build_uniform_split(
                tc,
                samples,
                Some(a.clone()),
                &ApproxOptions {
                    probes: 2,
                    ..ApproxOptions::default()
                },
            )?;
            joint_margin(&proxy, a)? / 3.0
        }
    };
    RhoEstimate::new(min_r / 3.0, rho_y, tc.radius())
}
