use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;

use super::Partition;

/// Piecewise-constant nonatomic profile `θ ↦ xᵢ` for `θ ∈ Θᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    partition: Partition,
    actions: Vec<Vector>,
}

impl StepProfile {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn actions(&self) -> &[Vector] {
        &self.actions
    }

    pub fn eval(&self, theta: f64) -> Option<&Vector> {
        self.partition.locate(theta).map(|i| &self.actions[i])
    }

    /// `∫₀¹ x_θ dθ = Σ |Θᵢ|·xᵢ`.
    pub fn integral(&self) -> Vector {
        let dim = self.actions.first().map_or(0, |a| a.len());
        let mut acc = Vector::zeros(dim);
        for (region, x) in self.partition.regions.iter().zip(&self.actions) {
            acc += x * region.measure();
        }
        acc
    }

    /// Average of the profile over each region of `target`, i.e. the
    /// symmetric profile `ψ̄(x)` of the partition `target`.
    pub fn average_over(&self, target: &Partition) -> Vec<Vector> {
        let dim = self.actions.first().map_or(0, |a| a.len());
        let mut cuts = self.partition.breakpoints();
        cuts.extend(target.breakpoints());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut sums = vec![Vector::zeros(dim); target.len()];
        let mut mass = vec![0.0; target.len()];
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (Some(i), Some(x)) = (target.locate(mid), self.eval(mid)) else {
                continue;
            };
            sums[i] += x * (w[1] - w[0]);
            mass[i] += w[1] - w[0];
        }
        sums.into_iter()
            .zip(mass)
            .map(|(s, m)| if m > 0.0 { s / m } else { s })
            .collect()
    }

    /// `L²([0,1])` distance, exact for two step profiles.
    pub fn l2_distance(&self, other: &StepProfile) -> f64 {
        let mut cuts = self.partition.breakpoints();
        cuts.extend(other.partition.breakpoints());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut sq = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if let (Some(a), Some(b)) = (self.eval(mid), other.eval(mid)) {
                sq += (a - b).norm_squared() * (w[1] - w[0]);
            }
        }
        sq.sqrt()
    }
}

/// Embeds a symmetric profile (one action per type) as a step profile.
pub fn psi_embed(actions: &[Vector], partition: &Partition) -> Result<StepProfile> {
    check_dim(partition.len(), actions.len())?;
    if let Some(first) = actions.first() {
        if actions.iter().any(|a| a.len() != first.len()) {
            return Err(Error::contract("all actions must have the same dimension"));
        }
    }
    Ok(StepProfile {
        partition: partition.clone(),
        actions: actions.to_vec(),
    })
}

/// `ψ̄ᵢ(x) = ∫_{Θᵢ} x_θ dθ / μᵢ` for a step profile `x`.
pub fn psi_bar(profile: &StepProfile, partition: &Partition) -> Vec<Vector> {
    profile.average_over(partition)
}
