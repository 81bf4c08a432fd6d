//! Shared fixtures: shipped configs, random small games and a brute-force
//! KKT oracle that shares no code with the solver.
#![allow(dead_code)]

use std::path::PathBuf;

use aggsolve::game_model::{CostParams, FiniteTypeGame, PolytopeSet};
use aggsolve::linalg::{Matrix, Vector};
use aggsolve::scenarios::{approximate, load_config, LoadedConfig, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SHIPPED: [&str; 5] = [
    "smartgrid",
    "box_meshgrid",
    "box_meshgrid_coupled",
    "interval_jump",
    "finite_coupled",
];

/// Configs that describe a continuum game and can be swept.
pub const SWEEPABLE: [&str; 4] = ["smartgrid", "box_meshgrid", "box_meshgrid_coupled", "interval_jump"];

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.json"))
}

pub fn config(name: &str) -> LoadedConfig {
    load_config(config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A finite game of every shipped config; continuum configs are discretized
/// at `nu`.
pub fn shipped_game(name: &str, nu: usize) -> FiniteTypeGame {
    let cfg = config(name);
    match &cfg.scenario {
        Scenario::Finite(g) => g.clone(),
        Scenario::SmartGrid { scenario, .. } => scenario.build(nu).unwrap(),
        Scenario::Characteristic { .. } => approximate(&cfg, nu, None).unwrap().0,
    }
}

/// Random quadratic game with `I·T ≤ 6`, boxes as action sets and a
/// strongly monotone operator. With `coupled`, a halfspace on the aggregate
/// is active at the equilibrium.
pub fn random_strongly_monotone(seed: u64, coupled: bool) -> FiniteTypeGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.gen_range(1..=3usize);
    let i_max = 6 / t;
    let types = rng.gen_range(1..=i_max);
    let rand_mat = |rng: &mut ChaCha8Rng| Matrix::from_fn(t, t, |_, _| rng.gen_range(-1.0..1.0));

    let b = rand_mat(&mut rng);
    let k = rand_mat(&mut rng);
    // PSD symmetric part plus a skew part
    let c = &b * b.transpose() * 0.5 + (&k - k.transpose()) * 0.5;
    let d = Vector::from_fn(t, |_, _| rng.gen_range(-0.5..0.5));

    let raw: Vec<f64> = (0..types).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let masses: Vec<f64> = raw.iter().map(|m| m / total).collect();

    let mut sets = Vec::new();
    let mut costs = Vec::new();
    for _ in 0..types {
        let lo: Vec<f64> = (0..t).map(|_| rng.gen_range(-1.0..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.5..2.0)).collect();
        sets.push(PolytopeSet::hyperbox(&lo, &hi).unwrap());
        let g = rand_mat(&mut rng);
        let s = &g * g.transpose() + Matrix::identity(t, t) * rng.gen_range(0.2..1.0);
        let r = Vector::from_fn(t, |_, _| rng.gen_range(-3.0..3.0));
        costs.push(CostParams::new(c.clone(), d.clone(), s, r).unwrap().into());
    }

    let free = FiniteTypeGame::new(masses.clone(), sets.clone(), costs.clone(), None).unwrap();
    if !coupled {
        return free;
    }
    // a halfspace aᵀX ≤ h that cuts off the unconstrained equilibrium aggregate,
    // boxed by the bounding box of Y
    let x_free = free.aggregate(&kkt_oracle(&affine_vi(&free)).expect("oracle"));
    let mut bound: f64 = 0.0;
    for set in &sets {
        bound = bound.max(set.radius());
    }
    let (a, lo) = loop {
        let a = Vector::from_fn(t, |_, _| rng.gen_range(-1.5..1.5));
        // smallest aᵀX over Y
        let mut lo = 0.0;
        for (set, m) in sets.iter().zip(&masses) {
            let b = set.b();
            for k in 0..t {
                lo += m * (a[k] * b[k]).min(-a[k] * b[t + k]);
            }
        }
        if a.dot(&x_free) - lo > 0.1 {
            break (a, lo);
        }
    };
    let h = lo + rng.gen_range(0.3..0.7) * (a.dot(&x_free) - lo);
    let mut p = Matrix::zeros(2 * t + 1, t);
    let mut rhs = Vector::zeros(2 * t + 1);
    for k in 0..t {
        p[(k, k)] = 1.0;
        p[(t + k, k)] = -1.0;
        rhs[k] = bound + 1.0;
        rhs[t + k] = bound + 1.0;
    }
    p.row_mut(2 * t).copy_from(&a.transpose());
    rhs[2 * t] = h;
    let constraint = Some(PolytopeSet::new(p, rhs).unwrap());
    FiniteTypeGame::new(masses, sets, costs, constraint).unwrap()
}

/// The SVWE operator `F(x) = M x + q` of a quadratic game and its coupled
/// set `{G x ≤ h, E x = f}`, assembled directly from the cost parameters.
pub struct AffineVi {
    pub m: Matrix,
    pub q: Vector,
    pub g: Matrix,
    pub h: Vector,
    pub e: Matrix,
    pub f: Vector,
}

pub fn affine_vi(game: &FiniteTypeGame) -> AffineVi {
    let t = game.dim();
    let n = game.stacked_dim();
    let mu = game.masses();
    let mut m = Matrix::zeros(n, n);
    let mut q = Vector::zeros(n);
    let mut g_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut e_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, (cost, set)) in game.costs().iter().zip(game.sets()).enumerate() {
        let cp = cost.as_quadratic().expect("quadratic cost");
        for j in 0..game.num_types() {
            let mut block = m.view_mut((i * t, j * t), (t, t));
            block += &cp.price_slope * (mu[i] * mu[j]);
        }
        let mut diag = m.view_mut((i * t, i * t), (t, t));
        diag += &cp.curvature * mu[i];
        q.rows_mut(i * t, t)
            .copy_from(&((&cp.base_price - &cp.utility_slope) * mu[i]));
        for (mat, rhs, out) in [(set.p(), set.b(), &mut g_rows), (set.q(), set.e(), &mut e_rows)] {
            for k in 0..mat.nrows() {
                let mut row = vec![0.0; n];
                for c in 0..t {
                    row[i * t + c] = mat[(k, c)];
                }
                out.push((row, rhs[k]));
            }
        }
    }
    if let Some(a) = game.constraint() {
        for (mat, rhs, out) in [(a.p(), a.b(), &mut g_rows), (a.q(), a.e(), &mut e_rows)] {
            for k in 0..mat.nrows() {
                let mut row = vec![0.0; n];
                for i in 0..game.num_types() {
                    for c in 0..t {
                        row[i * t + c] = mu[i] * mat[(k, c)];
                    }
                }
                out.push((row, rhs[k]));
            }
        }
    }
    let stack = |rows: &[(Vec<f64>, f64)]| {
        (
            Matrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]),
            Vector::from_iterator(rows.len(), rows.iter().map(|r| r.1)),
        )
    };
    let (g, h) = stack(&g_rows);
    let (e, f) = stack(&e_rows);
    AffineVi { m, q, g, h, e, f }
}

/// Solves the affine VI by enumerating active sets of the inequality rows and
/// checking the KKT conditions of each candidate.
pub fn kkt_oracle(vi: &AffineVi) -> Option<Vector> {
    let n = vi.m.nrows();
    let p = vi.g.nrows();
    let k = vi.e.nrows();
    let tol = 1e-9;
    for mask in 0u64..(1u64 << p) {
        let active: Vec<usize> = (0..p).filter(|j| mask & (1 << j) != 0).collect();
        if active.len() + k > n {
            continue;
        }
        let size = n + active.len() + k;
        let mut kkt = Matrix::zeros(size, size);
        let mut rhs = Vector::zeros(size);
        kkt.view_mut((0, 0), (n, n)).copy_from(&vi.m);
        rhs.rows_mut(0, n).copy_from(&-&vi.q);
        for (a, &j) in active.iter().enumerate() {
            for c in 0..n {
                kkt[(c, n + a)] = vi.g[(j, c)];
                kkt[(n + a, c)] = vi.g[(j, c)];
            }
            rhs[n + a] = vi.h[j];
        }
        for r in 0..k {
            let at = n + active.len() + r;
            for c in 0..n {
                kkt[(c, at)] = vi.e[(r, c)];
                kkt[(at, c)] = vi.e[(r, c)];
            }
            rhs[at] = vi.f[r];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else {
            continue;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let x = sol.rows(0, n).into_owned();
        let multipliers_ok = (0..active.len()).all(|a| sol[n + a] >= -tol);
        let primal_ok = (&vi.g * &x - &vi.h).iter().all(|v| *v <= tol);
        if multipliers_ok && primal_ok {
            return Some(x);
        }
    }
    None
}
