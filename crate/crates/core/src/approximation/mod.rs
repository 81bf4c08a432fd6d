//! Finite-type approximating games built from a type characteristic, and the
//! discretization metrics `δ̄`, `ε̄`, `D` that drive the error bounds.

mod embed;
mod meshgrid;
mod metrics;
mod uniform;

use serde::{Deserialize, Serialize};

pub use embed::{psi_bar, psi_embed, StepProfile};
pub use meshgrid::build_meshgrid;
pub use metrics::{compute_delta, compute_epsilon, EXACT_HAUSDORFF_MAX_DIM};
pub use uniform::build_uniform_split;

/// Sampling point of each interval for uniform splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    #[default]
    Mid,
    Right,
}

impl std::str::FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Endpoint::Left),
            "mid" => Ok(Endpoint::Mid),
            "right" => Ok(Endpoint::Right),
            other => Err(format!("unknown endpoint `{other}` (left, mid, right)")),
        }
    }
}

/// How a metric value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Exact by construction.
    Exact,
    /// Exact at every probe `θ`; the supremum over `Θᵢ` is taken on the probes.
    Sampled,
    /// Conservative bound.
    UpperBound,
}

#[derive(Debug, Clone)]
pub struct ApproxOptions {
    pub endpoint: Endpoint,
    /// Probe points per interval for the suprema over `Θᵢ` (uniform splitting).
    pub probes: usize,
    /// Quadrature points of `[0, 1]` for meshgrid approximation.
    pub theta_samples: usize,
    /// Refuse meshgrids with more cells than this.
    pub cell_cap: u128,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            endpoint: Endpoint::Mid,
            probes: 64,
            theta_samples: 4096,
            cell_cap: 1_000_000_000,
        }
    }
}

/// Player set `Θᵢ` of one type: a finite union of intervals, plus the points
/// `(piece, θ)` at which the suprema over `Θᵢ` are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub intervals: Vec<(f64, f64)>,
    #[serde(skip)]
    pub probes: Vec<(usize, f64)>,
}

impl Region {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= theta && theta < b)
            || self.intervals.last().is_some_and(|&(_, b)| theta == b && b == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub regions: Vec<Region>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Index of the region containing `θ`.
    pub fn locate(&self, theta: f64) -> Option<usize> {
        self.regions.iter().position(|r| r.contains(theta))
    }

    /// Sorted breakpoints of all regions.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .regions
            .iter()
            .flat_map(|r| r.intervals.iter().flat_map(|&(a, b)| [a, b]))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxMetrics {
    pub nu: usize,
    #[serde(rename = "I")]
    pub num_types: usize,
    pub delta_bar: f64,
    pub delta_provenance: Provenance,
    pub eps_bar: f64,
    pub eps_provenance: Provenance,
    #[serde(rename = "D")]
    pub d: f64,
    pub partition: Partition,
}
