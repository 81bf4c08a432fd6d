use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{
    bounds_with_lambda, compute_lf_characteristic, estimate_rho_characteristic, lambda_bar,
    BoundConstants, ConvergenceRow,
};
use crate::approximation::{build_meshgrid, build_uniform_split, psi_embed, ApproxMetrics, ApproxOptions, Endpoint, StepProfile};
use crate::error::{Error, Result};
use crate::game_model::{characteristic_certificate, FiniteTypeGame, PolytopeSet, TypeCharacteristic};
use crate::linalg::{self, Vector};
use crate::vi_solver::{solve_svwe, solve_vne, SolveOptions, SolveReport};

use super::config::{LoadedConfig, Method, Scenario};

/// Caps the sweep worker pool.
pub const THREADS_ENV: &str = "AGGSOLVE_THREADS";

/// Samples per continuity piece for the characteristic-level constants.
const CONSTANT_SAMPLES: usize = 256;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub nu: Vec<usize>,
    pub tol: f64,
    pub max_iter: usize,
    /// Overrides the endpoint of the config (right for the smart grid).
    pub endpoint: Option<Endpoint>,
    pub seed: u64,
    /// Solve the atomic game for Nash equilibria instead.
    pub vne: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            nu: vec![1, 2, 4, 8, 16, 32, 64],
            tol: 1e-8,
            max_iter: 1_000_000,
            endpoint: None,
            seed: 42,
            vne: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// One row per `ν` that produced a solve report, in `ν` order.
    pub rows: Vec<ConvergenceRow>,
    /// `(ν, reason)` for every row that errored or did not converge.
    pub failures: Vec<(usize, String)>,
}

impl SweepOutcome {
    pub fn all_converged(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn worker_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

struct Continuum<'a> {
    tc: TypeCharacteristic,
    constraint: Option<&'a PolytopeSet>,
    method: Method,
    options: ApproxOptions,
    /// `L_f` override.
    l_f: Option<f64>,
    reference_aggregate: Option<Vector>,
}

fn continuum<'a>(cfg: &'a LoadedConfig, endpoint: Option<Endpoint>) -> Result<Continuum<'a>> {
    match &cfg.scenario {
        Scenario::SmartGrid { scenario, .. } => Ok(Continuum {
            tc: scenario.characteristic()?,
            constraint: None,
            method: Method::Uniform,
            options: ApproxOptions {
                endpoint: endpoint.unwrap_or(Endpoint::Right),
                ..ApproxOptions::default()
            },
            l_f: Some(scenario.lf()),
            reference_aggregate: Some(scenario.analytic_vwe()),
        }),
        Scenario::Characteristic {
            tc,
            constraint,
            method,
            options,
        } => {
            let mut options = options.clone();
            if let Some(e) = endpoint {
                options.endpoint = e;
            }
            Ok(Continuum {
                tc: tc.clone(),
                constraint: constraint.as_ref(),
                method: *method,
                options,
                l_f: None,
                reference_aggregate: cfg
                    .reference
                    .as_ref()
                    .and_then(|r| r.aggregate.as_ref())
                    .map(|a| Vector::from_column_slice(a)),
            })
        }
        Scenario::Finite(_) => Err(Error::Config {
            line: 0,
            column: 0,
            message: "a sweep needs a `characteristic` or `smartgrid` scenario".into(),
        }),
    }
}

impl Continuum<'_> {
    fn approximate(&self, nu: usize) -> Result<(FiniteTypeGame, ApproxMetrics)> {
        let constraint = self.constraint.cloned();
        match self.method {
            Method::Uniform => build_uniform_split(&self.tc, nu, constraint, &self.options),
            Method::Meshgrid => build_meshgrid(&self.tc, nu, constraint, &self.options),
        }
    }
}

/// Approximating game of index `ν` of a characteristic or smart-grid config.
pub fn approximate(
    cfg: &LoadedConfig,
    nu: usize,
    endpoint: Option<Endpoint>,
) -> Result<(FiniteTypeGame, ApproxMetrics)> {
    continuum(cfg, endpoint)?.approximate(nu)
}

/// Solves the game a config describes. Characteristic configs need `nu`; the
/// smart grid uses `nu`, then its own `I`, then ten types.
pub fn solve_scenario(
    cfg: &LoadedConfig,
    nu: Option<usize>,
    vne: bool,
    options: &SolveOptions,
) -> Result<SolveReport> {
    let game = match &cfg.scenario {
        Scenario::Finite(game) => game.clone(),
        Scenario::SmartGrid { scenario, types } => scenario.build(nu.or(*types).unwrap_or(10))?,
        Scenario::Characteristic { .. } => {
            let nu = nu.ok_or_else(|| Error::Config {
                line: 0,
                column: 0,
                message: "solving a characteristic config needs --nu".into(),
            })?;
            approximate(cfg, nu, None)?.0
        }
    };
    if vne {
        solve_vne(&game, options)
    } else {
        solve_svwe(&game, options)
    }
}

fn row_seed(seed: u64, nu: usize) -> u64 {
    seed ^ (nu as u64).wrapping_mul(SEED_STRIDE)
}

/// Solves the approximating game of every `ν` and compares it with the
/// reference equilibrium: the closed form for the smart grid, otherwise the
/// config's `reference` (a known aggregate, or a fine uniform split whose
/// profile also gives `err_profile` in strongly monotone games).
pub fn run_sweep(cfg: &LoadedConfig, options: &SweepOptions) -> Result<SweepOutcome> {
    if options.nu.contains(&0) {
        return Err(Error::contract("every nu must be at least 1"));
    }
    let cont = continuum(cfg, options.endpoint)?;
    let cert = characteristic_certificate(&cont.tc, CONSTANT_SAMPLES);
    let rho = match cont.constraint {
        Some(a) => Some(estimate_rho_characteristic(&cont.tc, Some(a), CONSTANT_SAMPLES)?),
        None => None,
    };
    let l_f = cont
        .l_f
        .unwrap_or_else(|| compute_lf_characteristic(&cont.tc, CONSTANT_SAMPLES));
    let constants = BoundConstants::new(l_f, cont.tc.radius(), rho, &cert);
    let c_norm = linalg::spectral_norm(cont.tc.price_slope());

    let solve_opts = |nu: usize| SolveOptions {
        tol: options.tol,
        max_iter: options.max_iter,
        seed: Some(row_seed(options.seed, nu)),
        ..SolveOptions::default()
    };

    let proxy_nu = cfg.reference.as_ref().and_then(|r| r.nu);
    let mut reference_aggregate = cont.reference_aggregate.clone();
    let mut reference_profile: Option<StepProfile> = None;
    if let (Some(nu), None) = (proxy_nu, &cont.reference_aggregate) {
        let (game, metrics) = build_uniform_split(
            &cont.tc,
            nu,
            cont.constraint.cloned(),
            &ApproxOptions {
                endpoint: Endpoint::Mid,
                probes: 2,
                ..cont.options.clone()
            },
        )?;
        // tighter than the rows so that the reference error stays negligible;
        // the iteration cap of the rows does not apply
        let report = solve_svwe(
            &game,
            &SolveOptions {
                tol: 1e-2 * options.tol,
                max_iter: SolveOptions::default().max_iter.max(options.max_iter),
                ..solve_opts(nu)
            },
        )?;
        if !report.converged {
            return Err(Error::Contract(format!(
                "reference solve at nu = {nu} did not converge (residual {:.3e})",
                report.residual
            )));
        }
        let blocks: Vec<Vector> = (0..game.num_types()).map(|i| game.block(&report.x_hat(), i)).collect();
        reference_profile = Some(psi_embed(&blocks, &metrics.partition)?);
        reference_aggregate = Some(report.aggregate());
    }

    let row = |nu: usize| -> Result<(ConvergenceRow, bool, f64)> {
        let (game, metrics) = cont.approximate(nu)?;
        let report = if options.vne {
            solve_vne(&game, &solve_opts(nu))?
        } else {
            solve_svwe(&game, &solve_opts(nu))?
        };
        let lambda = options
            .vne
            .then(|| lambda_bar(game.masses(), c_norm, cont.tc.radius(), game.dim()));
        let bounds = bounds_with_lambda(&metrics, &constants, lambda.unwrap_or(0.0));
        let err_agg = reference_aggregate.as_ref().map(|x| (report.aggregate() - x).norm());
        let err_profile = match (&reference_profile, cert.alpha > 0.0) {
            (Some(reference), true) => {
                let x = report.x_hat();
                let blocks: Vec<Vector> = (0..game.num_types()).map(|i| game.block(&x, i)).collect();
                Some(psi_embed(&blocks, &metrics.partition)?.l2_distance(reference))
            }
            _ => None,
        };
        let row = ConvergenceRow {
            nu,
            num_types: metrics.num_types,
            delta_bar: metrics.delta_bar,
            eps_bar: metrics.eps_bar,
            d: metrics.d,
            lambda_bar: lambda,
            l_f: constants.l_f,
            k_a: constants.k_a,
            alpha: constants.alpha,
            beta: constants.beta,
            omega: bounds.omega,
            err_agg,
            bound_agg: bounds.bound_agg,
            err_profile,
            bound_profile: bounds.bound_profile,
            iterations: report.iterations,
            residual: report.residual,
            applicable: bounds.applicable,
        };
        Ok((row, report.converged, report.residual))
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Contract(format!("cannot start the worker pool: {e}")))?;
    let results: Vec<Result<(ConvergenceRow, bool, f64)>> =
        pool.install(|| options.nu.par_iter().map(|&nu| row(nu)).collect());

    let mut outcome = SweepOutcome::default();
    for (&nu, result) in options.nu.iter().zip(results) {
        match result {
            Ok((row, converged, residual)) => {
                if !converged {
                    outcome
                        .failures
                        .push((nu, format!("not converged (residual {residual:.3e})")));
                }
                outcome.rows.push(row);
            }
            Err(e) => outcome.failures.push((nu, e.to_string())),
        }
    }
    Ok(outcome)
}

pub fn write_csv(rows: &[ConvergenceRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ConvergenceRow::HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}
