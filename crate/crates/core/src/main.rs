use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use aggsolve::approximation::Endpoint;
use aggsolve::scenarios::{load_config, run_sweep, solve_scenario, write_csv, SmartGridScenario, SweepOptions};
use aggsolve::vi_solver::{solve_svwe, solve_vne, SolveOptions, SolveReport};
use aggsolve::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "aggsolve", version, about = "Equilibria of nonatomic aggregative games via finite-type approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the game of a config and print the report as JSON.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Nash equilibrium of the atomic game instead of the symmetric VWE.
        #[arg(long)]
        vne: bool,
        /// Approximation index for characteristic configs, type count for the smart grid.
        #[arg(long)]
        nu: Option<usize>,
        /// Start from a seeded random point instead of the origin.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
    },
    /// Convergence sweep over approximation indices, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        nu: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        endpoint: Option<Endpoint>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        vne: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
    },
    /// Closed-form smart-grid equilibrium next to the solved finite-type game.
    Smartgrid {
        #[arg(long = "aO", default_value_t = 1.0)]
        a_o: f64,
        #[arg(long = "aP", default_value_t = 2.0)]
        a_p: f64,
        #[arg(long = "Emax", default_value_t = 20.0)]
        e_max: f64,
        #[arg(long = "N", default_value_t = 3e7)]
        n: f64,
        #[arg(long = "I", default_value_t = 10)]
        types: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        vne: bool,
    },
}

#[derive(Serialize)]
struct SmartGridOutput {
    #[serde(rename = "I")]
    types: usize,
    #[serde(rename = "X_star")]
    x_star: Vec<f64>,
    #[serde(rename = "X_hat_analytic")]
    x_hat_analytic: Vec<f64>,
    err_analytic: f64,
    bound: f64,
    err_solved: f64,
    report: SolveReport,
}

fn fail(code: u8, err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve {
            config,
            tol,
            vne,
            nu,
            seed,
            max_iter,
        } => {
            let cfg = match load_config(&config) {
                Ok(cfg) => cfg,
                Err(e) => return fail(EXIT_CONFIG, &e),
            };
            let options = SolveOptions {
                tol,
                max_iter,
                seed,
                ..SolveOptions::default()
            };
            match solve_scenario(&cfg, nu, vne, &options) {
                Ok(report) => {
                    print_json(&report);
                    if report.converged {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: not converged after {} iterations", report.iterations);
                        ExitCode::from(EXIT_SOLVER)
                    }
                }
                Err(e @ Error::Config { .. }) => fail(EXIT_CONFIG, &e),
                Err(e) => fail(EXIT_SOLVER, &e),
            }
        }
        Command::Sweep {
            config,
            nu,
            tol,
            out,
            endpoint,
            seed,
            vne,
            max_iter,
        } => {
            let cfg = match load_config(&config) {
                Ok(cfg) => cfg,
                Err(e) => return fail(EXIT_CONFIG, &e),
            };
            let options = SweepOptions {
                nu,
                tol,
                max_iter,
                endpoint,
                seed,
                vne,
            };
            let outcome = match run_sweep(&cfg, &options) {
                Ok(o) => o,
                Err(e @ Error::Config { .. }) => return fail(EXIT_CONFIG, &e),
                Err(e) => return fail(EXIT_SOLVER, &e),
            };
            if let Err(e) = write_csv(&outcome.rows, &out) {
                return fail(EXIT_SOLVER, &e);
            }
            for (nu, reason) in &outcome.failures {
                eprintln!("nu = {nu}: {reason}");
            }
            if outcome.all_converged() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SOLVER)
            }
        }
        Command::Smartgrid {
            a_o,
            a_p,
            e_max,
            n,
            types,
            tol,
            vne,
        } => {
            let sc = match SmartGridScenario::new(a_o, a_p, e_max, n) {
                Ok(sc) => sc,
                Err(e) => return fail(EXIT_CONFIG, &e),
            };
            let game = match sc.build(types) {
                Ok(g) => g,
                Err(e) => return fail(EXIT_CONFIG, &e),
            };
            let options = SolveOptions {
                tol,
                ..SolveOptions::default()
            };
            let report = match if vne { solve_vne(&game, &options) } else { solve_svwe(&game, &options) } {
                Ok(r) => r,
                Err(e) => return fail(EXIT_SOLVER, &e),
            };
            let x_star = sc.analytic_vwe();
            let analytic = sc.analytic_svwe_error(types);
            let converged = report.converged;
            print_json(&SmartGridOutput {
                types,
                x_star: x_star.iter().copied().collect(),
                x_hat_analytic: analytic.x_hat,
                err_analytic: analytic.err,
                bound: analytic.bound,
                err_solved: (report.aggregate() - &x_star).norm(),
                report,
            });
            if converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SOLVER)
            }
        }
    }
}
