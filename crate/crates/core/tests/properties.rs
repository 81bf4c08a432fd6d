mod common;

use std::sync::Arc;

use aggsolve::analysis::{
    compute_lf, empirical_monotonicity, omega, random_feasible, BoundConstants, ConvergenceRow, RhoEstimate,
};
use aggsolve::approximation::{build_meshgrid, build_uniform_split, ApproxOptions};
use aggsolve::game_model::{
    monotonicity_certificate, CharacteristicPiece, CostParams, MonotonicityCertificate, MonotonicityClass,
    PolytopeSet, TypeCharacteristic,
};
use aggsolve::linalg::{Matrix, Vector};
use aggsolve::vi_solver::{project_polytope, solve_svwe, vi_residual, SolveOptions, ViProblem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_strongly_monotone;

fn matrix(t: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0..2.0f64, t * t).prop_map(move |v| Matrix::from_row_slice(t, t, &v))
}

fn vector(t: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2.0..2.0f64, t).prop_map(Vector::from_vec)
}

fn cost_and_point() -> impl Strategy<Value = (CostParams, Vector, Vector)> {
    (1usize..=3).prop_flat_map(|t| {
        (matrix(t), vector(t), matrix(t), vector(t), vector(t), vector(t)).prop_map(|(c, d, s, r, x, y)| {
            let s = &s + s.transpose();
            (CostParams::new(c, d, s, r).unwrap(), x, y)
        })
    })
}

/// Box with corners drawn from `[-1, 0]` and widths from `[0.2, 2]`, or a
/// simplex with budget in `[0.2, 2]`.
fn action_set() -> impl Strategy<Value = PolytopeSet> {
    prop_oneof![
        (1usize..=3).prop_flat_map(|t| {
            (prop::collection::vec(-1.0..0.0f64, t), prop::collection::vec(0.2..2.0f64, t)).prop_map(|(lo, w)| {
                let hi: Vec<f64> = lo.iter().zip(&w).map(|(l, w)| l + w).collect();
                PolytopeSet::hyperbox(&lo, &hi).unwrap()
            })
        }),
        (2usize..=3, 0.2..2.0f64).prop_map(|(t, e)| PolytopeSet::simplex(t, e).unwrap()),
    ]
}

fn linear_characteristic(slope_b: f64, slope_r: f64) -> TypeCharacteristic {
    let template = PolytopeSet::interval(0.0, 1.0).unwrap();
    let piece = CharacteristicPiece {
        start: 0.0,
        end: 1.0,
        rhs: Arc::new(move |th| Vector::from_vec(vec![1.0 + slope_b * th, 0.0])),
        utility: Arc::new(move |th| {
            (
                Matrix::from_element(1, 1, 1.0 + th),
                Vector::from_element(1, slope_r * th),
            )
        }),
    };
    TypeCharacteristic::new(&template, Matrix::identity(1, 1), Vector::zeros(1), vec![piece]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_finite_differences((cost, x, agg) in cost_and_point()) {
        let g = cost.eval_grad(&x, &agg).unwrap();
        let h = 1e-6;
        for k in 0..x.len() {
            let mut e = Vector::zeros(x.len());
            e[k] = h;
            let fd = (cost.eval_cost(&(&x + &e), &agg).unwrap() - cost.eval_cost(&(&x - &e), &agg).unwrap())
                / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6 * (1.0 + g[k].abs()), "{} vs {}", fd, g[k]);
        }
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive(
        set in action_set(),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = set.dim();
        for _ in 0..20 {
            let a = Vector::from_fn(t, |_, _| rng.gen_range(-4.0..4.0));
            let b = Vector::from_fn(t, |_, _| rng.gen_range(-4.0..4.0));
            let pa = project_polytope(&a, &set, 1e-13).unwrap();
            let pb = project_polytope(&b, &set, 1e-13).unwrap();
            prop_assert!(set.violation(&pa) <= 1e-9);
            prop_assert!((project_polytope(&pa, &set, 1e-13).unwrap() - &pa).norm() <= 1e-9);
            prop_assert!((&pa - &pb).norm() <= (&a - &b).norm() + 1e-9);
            // variational characterization: ⟨a − Π(a), z − Π(a)⟩ ≤ 0 at the vertices z
            for v in set.vertices() {
                prop_assert!((&a - &pa).dot(&(&v - &pa)) <= 1e-8);
            }
        }
    }

    #[test]
    fn omega_is_monotone_in_each_metric(
        delta in 0.0..1.0f64, eps in 0.0..1.0f64, d in 0.0..1.0f64, bump in 0.0..1.0f64,
        constrained in any::<bool>(),
    ) {
        let cert = MonotonicityCertificate { class: MonotonicityClass::StronglyAndAggregatively, alpha: 1.0, beta: 1.0 };
        let rho = constrained.then_some(RhoEstimate { rho0: 0.5, rho_y: 0.4, rho_min: 0.4, k_a: 5.0 });
        let c = BoundConstants::new(2.0, 1.0, rho, &cert);
        let base = omega(delta, eps, d, &c).0;
        prop_assert!(omega(delta + bump, eps, d, &c).0 >= base);
        prop_assert!(omega(delta, eps + bump, d, &c).0 >= base);
        prop_assert!(omega(delta, eps, d + bump, &c).0 >= base);
    }

    #[test]
    fn csv_record_round_trips(delta in any::<f64>().prop_filter("finite", |v| v.is_finite()), nu in 1usize..1000) {
        let row = ConvergenceRow { nu, num_types: nu, delta_bar: delta, err_agg: Some(delta / 3.0), ..ConvergenceRow::default() };
        let rec = row.record();
        prop_assert_eq!(rec[2].parse::<f64>().unwrap(), delta);
        prop_assert_eq!(rec[11].parse::<f64>().unwrap(), delta / 3.0);
        prop_assert_eq!(&rec[13], "");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificate_is_sound(seed in any::<u64>(), coupled in any::<bool>()) {
        let game = random_strongly_monotone(seed, coupled);
        let cert = monotonicity_certificate(&game);
        let emp = empirical_monotonicity(&game, 200, seed).unwrap();
        prop_assert!(emp.alpha_hat >= cert.alpha - 1e-9);
        prop_assert!(emp.beta_hat >= cert.beta - 1e-9);
    }

    #[test]
    fn equilibrium_is_feasible_and_certified(seed in any::<u64>(), coupled in any::<bool>()) {
        let game = random_strongly_monotone(seed, coupled);
        let rep = solve_svwe(&game, &SolveOptions { tol: 1e-10, ..SolveOptions::default() }).unwrap();
        prop_assert!(rep.converged);
        let x_hat = rep.x_hat();
        prop_assert!(game.violation(&x_hat) <= 1e-9);
        let g = game.gradients(&x_hat);
        let t = game.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..1000 {
            let x = random_feasible(&game, &mut rng).unwrap();
            let mut gap = 0.0;
            for (i, m) in game.masses().iter().enumerate() {
                gap += m * g.rows(i * t, t).dot(&(x.rows(i * t, t) - x_hat.rows(i * t, t)));
            }
            prop_assert!(gap >= -1e-6, "gap {}", gap);
        }
    }

    #[test]
    fn residual_is_continuous(seed in any::<u64>()) {
        let game = random_strongly_monotone(seed, false);
        let problem = ViProblem::svwe(&game).unwrap();
        let rep = solve_svwe(&game, &SolveOptions { tol: 1e-11, ..SolveOptions::default() }).unwrap();
        let tau = rep.step;
        let x = rep.x_hat();
        prop_assert!(vi_residual(&x, &problem, tau).unwrap() <= 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = Vector::from_fn(x.len(), |_, _| rng.gen_range(-1.0..1.0)).normalize();
        let eps = 1e-4;
        let moved = aggsolve::vi_solver::project_coupled(&(&x + &v * eps), &game, 1e-14).unwrap();
        let res = vi_residual(&moved, &problem, tau).unwrap();
        // Lipschitz continuity of the natural map: ‖r(x) − r(y)‖ ≤ (2/τ + L_F)‖x − y‖
        prop_assert!(res <= (2.0 / tau + problem.lipschitz()) * eps + 1e-9);
    }

    #[test]
    fn lf_dominates_sampled_gradients(seed in any::<u64>()) {
        let game = random_strongly_monotone(seed, false);
        let lf = compute_lf(&game).unwrap();
        let m = game.radius() + 1.0;
        let t = game.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 / 16 {
            let x = Vector::from_fn(t, |_, _| rng.gen_range(0.0..m));
            let y = Vector::from_fn(t, |_, _| rng.gen_range(0.0..m));
            for cost in game.costs() {
                prop_assert!(cost.gradient(&x, &y).norm() <= lf);
            }
        }
    }

    #[test]
    fn uniform_split_metrics_decay(slope_b in 0.0..2.0f64, slope_r in -2.0..2.0f64, nu in 1usize..16) {
        let tc = linear_characteristic(slope_b, slope_r);
        let options = ApproxOptions::default();
        let (g1, m1) = build_uniform_split(&tc, nu, None, &options).unwrap();
        let (_, m2) = build_uniform_split(&tc, 2 * nu, None, &options).unwrap();
        prop_assert!((g1.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        // midpoint sampling of a linear map: δ̄ = slope/(2ν)
        prop_assert!((m1.delta_bar - slope_b / (2.0 * nu as f64)).abs() <= 1e-9);
        prop_assert!(m2.delta_bar <= m1.delta_bar + 1e-12);
        prop_assert!(m2.eps_bar <= m1.eps_bar + 1e-12);
    }

    #[test]
    fn meshgrid_conserves_mass(slope_b in 0.1..2.0f64, slope_r in -2.0..2.0f64, nu in 1usize..12) {
        let tc = linear_characteristic(slope_b, slope_r);
        let options = ApproxOptions { theta_samples: 1024, ..ApproxOptions::default() };
        let (game, metrics) = build_meshgrid(&tc, nu, None, &options).unwrap();
        prop_assert!((game.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let measure: f64 = metrics.partition.regions.iter().map(|r| r.measure()).sum();
        prop_assert!((measure - 1.0).abs() <= 1e-12);
        for (region, mass) in metrics.partition.regions.iter().zip(game.masses()) {
            prop_assert!((region.measure() - mass).abs() <= 1e-12);
        }
    }
}
