//! Shipped scenarios, game configs and convergence sweeps.

mod config;
mod smartgrid;
mod sweep;

pub use config::{
    load_config, parse_config, CharacteristicConfig, ConstraintConfig, GameConfig, LoadedConfig, Method,
    PieceConfig, Poly, ReferenceConfig, Scenario, SmartGridConfig, TypeConfig,
};
pub use smartgrid::{SmartGridScenario, SvweError};
pub use sweep::{
    approximate, run_sweep, solve_scenario, worker_threads, write_csv, SweepOptions, SweepOutcome,
    THREADS_ENV,
};
