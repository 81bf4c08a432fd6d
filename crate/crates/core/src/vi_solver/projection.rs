use crate::error::{Error, Result};
use crate::game_model::{FiniteTypeGame, PolytopeSet};
use crate::linalg::{self, Matrix, Vector};

/// Sets with more than this many constraint rows are projected by Dykstra's
/// method over the individual halfspaces instead of the dual active-set solver.
pub const ACTIVE_SET_LIMIT: usize = 32;

const ACTIVE_SET_MAX_ITER: usize = 10_000;
const DYKSTRA_MAX_ITER: usize = 200_000;

/// Euclidean projection of `y` onto `set`.
///
/// `tol` is the accepted constraint violation of the result. Small sets use a
/// Goldfarb–Idnani dual active-set method (identity Hessian), which ends at a
/// KKT point up to rounding; larger ones fall back to Dykstra.
pub fn project_polytope(y: &Vector, set: &PolytopeSet, tol: f64) -> Result<Vector> {
    crate::error::check_dim(set.dim(), y.len())?;
    if set.num_constraints() <= ACTIVE_SET_LIMIT {
        dual_active_set(y, set, tol)
    } else {
        dykstra_halfspaces(y, set, tol)
    }
}

fn equality_start(y: &Vector, set: &PolytopeSet) -> Result<(Vector, Vec<Vector>)> {
    let q = set.q();
    if q.nrows() == 0 {
        return Ok((y.clone(), Vec::new()));
    }
    let resid = q * y - set.e();
    let qt = q.transpose();
    // minimum-norm correction w with Q w = Q y − e
    let w = &qt * linalg::lstsq(&(q * &qt), &resid);
    let x = y - w;
    if (q * &x - set.e()).norm() > 1e-9 * set.scale() {
        return Err(Error::Infeasible);
    }
    // independent subset of the equality normals
    let mut normals: Vec<Vector> = Vec::new();
    for k in 0..q.nrows() {
        let n = linalg::row(q, k);
        let mut cand = normals.clone();
        cand.push(n.clone());
        if linalg::rank(&columns(&cand, set.dim())) == cand.len() {
            normals.push(n);
        }
    }
    Ok((x, normals))
}

fn columns(cols: &[Vector], dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

fn dual_active_set(y: &Vector, set: &PolytopeSet, tol: f64) -> Result<Vector> {
    let dim = set.dim();
    let p = set.p();
    let b = set.b();
    let (mut x, eq_normals) = equality_start(y, set)?;
    let n_eq = eq_normals.len();

    // active normals (equalities first, never dropped) and their multipliers
    let mut normals = eq_normals;
    let mut mult = vec![0.0; n_eq];
    let mut active: Vec<usize> = Vec::new();
    let zero_tol = 1e-14;

    let violation = |x: &Vector, k: usize| linalg::row(p, k).dot(x) - b[k];

    for _ in 0..ACTIVE_SET_MAX_ITER {
        let mut worst = None;
        let mut worst_val = tol;
        for k in 0..p.nrows() {
            if active.contains(&k) {
                continue;
            }
            let v = violation(&x, k);
            if v > worst_val {
                worst_val = v;
                worst = Some(k);
            }
        }
        let Some(kp) = worst else {
            return Ok(x);
        };
        let np = linalg::row(p, kp);
        let mut u_plus = 0.0;

        loop {
            let (r, z) = if normals.is_empty() {
                (Vector::zeros(0), np.clone())
            } else {
                let n = columns(&normals, dim);
                let r = linalg::lstsq(&n, &np);
                let z = &np - &n * &r;
                (r, z)
            };
            let z_sq = z.norm_squared();
            let z_zero = z_sq <= zero_tol * np.norm_squared().max(1.0);

            let mut t1 = f64::INFINITY;
            let mut block = None;
            for j in n_eq..normals.len() {
                if r[j] > zero_tol {
                    let ratio = mult[j] / r[j];
                    if ratio < t1 {
                        t1 = ratio;
                        block = Some(j);
                    }
                }
            }
            let t2 = if z_zero {
                f64::INFINITY
            } else {
                violation(&x, kp).max(0.0) / z_sq
            };
            if z_zero && block.is_none() {
                return Err(Error::Infeasible);
            }
            let t = t1.min(t2);

            if !z_zero {
                x -= &z * t;
            }
            for j in 0..normals.len() {
                mult[j] -= t * r[j];
            }
            u_plus += t;

            if t2 <= t1 {
                normals.push(np.clone());
                mult.push(u_plus);
                active.push(kp);
                break;
            }
            let j = block.expect("blocking constraint");
            normals.remove(j);
            mult.remove(j);
            active.remove(j - n_eq);
        }
    }
    Err(Error::ProjectionNotConverged {
        iterations: ACTIVE_SET_MAX_ITER,
        best: x.iter().copied().collect(),
    })
}

/// Dykstra's alternating projections over the halfspaces `pₖᵀx ≤ bₖ` and the
/// equality hyperplanes of `set`.
fn dykstra_halfspaces(y: &Vector, set: &PolytopeSet, tol: f64) -> Result<Vector> {
    let dim = set.dim();
    let mut rows: Vec<(Vector, f64, bool)> = Vec::new();
    for k in 0..set.p().nrows() {
        rows.push((linalg::row(set.p(), k), set.b()[k], false));
    }
    for k in 0..set.q().nrows() {
        rows.push((linalg::row(set.q(), k), set.e()[k], true));
    }
    let mut x = y.clone();
    let mut corr = vec![Vector::zeros(dim); rows.len()];
    for _ in 0..DYKSTRA_MAX_ITER {
        let prev = x.clone();
        for (k, (a, rhs, eq)) in rows.iter().enumerate() {
            let z = &x + &corr[k];
            let a_sq = a.norm_squared();
            let v = a.dot(&z) - rhs;
            let next = if *eq || v > 0.0 { &z - a * (v / a_sq) } else { z.clone() };
            corr[k] = &z - &next;
            x = next;
        }
        if (&x - &prev).norm() <= tol * 1e-3 && set.violation(&x) <= tol {
            return Ok(x);
        }
    }
    Err(Error::ProjectionNotConverged {
        iterations: DYKSTRA_MAX_ITER,
        best: x.iter().copied().collect(),
    })
}

const COUPLED_MAX_ITER: usize = 1_000_000;

/// Euclidean projection of a stacked profile onto `{x ∈ ΠXᵢ : Σμᵢxᵢ ∈ A}`.
///
/// Without an aggregate constraint this is the per-type projection. Otherwise
/// Dykstra alternates between `ΠXᵢ` and the coupling set, whose projection is
/// `xᵢ = yᵢ + μᵢ(Z* − Ȳ)/Σμⱼ²` with `Ȳ = Σμⱼyⱼ` and `Z* = Π_A(Ȳ)`.
pub fn project_coupled(y: &Vector, game: &FiniteTypeGame, tol: f64) -> Result<Vector> {
    crate::error::check_dim(game.stacked_dim(), y.len())?;
    let inner_tol = tol * 1e-2;
    let Some(a) = game.constraint() else {
        return project_product(y, game, inner_tol);
    };
    let mu_sq: f64 = game.masses().iter().map(|m| m * m).sum();
    let couple = |v: &Vector| -> Result<Vector> {
        let agg = game.aggregate(v);
        let z = project_polytope(&agg, a, inner_tol)?;
        let shift = (z - agg) / mu_sq;
        let mut out = v.clone();
        for (i, &m) in game.masses().iter().enumerate() {
            let mut blk = out.rows_mut(i * game.dim(), game.dim());
            blk += &shift * m;
        }
        Ok(out)
    };

    let n = y.len();
    let mut x = y.clone();
    let mut p = Vector::zeros(n);
    let mut q = Vector::zeros(n);
    let mut gap = f64::INFINITY;
    for _ in 0..COUPLED_MAX_ITER {
        let yk = project_product(&(&x + &p), game, inner_tol)?;
        p = &x + &p - &yk;
        let x_next = couple(&(&yk + &q))?;
        q = &yk + &q - &x_next;
        let change = (&x_next - &x).norm();
        gap = (&x_next - &yk).norm();
        x = x_next;
        if change <= tol && gap <= tol {
            return Ok(yk);
        }
    }
    Err(Error::CoupledProjectionNotConverged {
        iterations: COUPLED_MAX_ITER,
        gap,
    })
}

/// Per-type projection onto `ΠXᵢ`.
pub(crate) fn project_product(y: &Vector, game: &FiniteTypeGame, tol: f64) -> Result<Vector> {
    use rayon::prelude::*;
    let t = game.dim();
    let project = |(i, set): (usize, &PolytopeSet)| {
        project_polytope(&y.rows(i * t, t).into_owned(), set, tol)
    };
    let blocks: Vec<Vector> = if game.num_types() >= 64 {
        game.sets()
            .par_iter()
            .enumerate()
            .map(project)
            .collect::<Result<_>>()?
    } else {
        game.sets()
            .iter()
            .enumerate()
            .map(project)
            .collect::<Result<_>>()?
    };
    Ok(game.stack(&blocks))
}
