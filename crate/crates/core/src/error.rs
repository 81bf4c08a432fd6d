use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("polytope is empty")]
    Infeasible,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("projection did not converge within {iterations} iterations")]
    ProjectionNotConverged { iterations: usize, best: Vec<f64> },

    #[error("coupled projection did not converge within {iterations} iterations (gap {gap:.3e})")]
    CoupledProjectionNotConverged { iterations: usize, gap: f64 },

    #[error("operator is not certified monotone (alpha = {alpha:.3e}, beta = {beta:.3e})")]
    NotMonotone { alpha: f64, beta: f64 },

    #[error("cost of player {player} is not convex in its own action (min eigenvalue {min_eig:.3e})")]
    NotConvex { player: usize, min_eig: f64 },

    #[error("meshgrid too fine: {cells} cells exceeds the cap of {cap}")]
    MeshgridTooFine { cells: u128, cap: u128 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate interior: {0}")]
    DegenerateInterior(String),

    #[error("all {0} sampled pairs were degenerate")]
    DegenerateSamples(usize),

    /// `line` is zero for errors that are not tied to a position.
    #[error("config error{}: {message}", position(*line, *column))]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line}, column {column}")
    }
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
