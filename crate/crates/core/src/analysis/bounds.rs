use serde::Serialize;

use crate::approximation::ApproxMetrics;
use crate::game_model::MonotonicityCertificate;

use super::RhoEstimate;

/// Constants of the equilibrium error bound of an approximating sequence.
#[derive(Debug, Clone, Serialize)]
pub struct BoundConstants {
    /// Uniform bound on the own-action gradients over `M²`.
    #[serde(rename = "L_f")]
    pub l_f: f64,
    /// Norm bound on points of `M`, taken as `R + 1`.
    #[serde(rename = "M")]
    pub m_scalar: f64,
    /// `None` without an aggregate constraint.
    pub rho: Option<RhoEstimate>,
    /// `(R+1)/ρ`, or `½` without an aggregate constraint.
    #[serde(rename = "K_A")]
    pub k_a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BoundConstants {
    /// `rho` must be given exactly when the game has an aggregate constraint.
    pub fn new(l_f: f64, radius: f64, rho: Option<RhoEstimate>, cert: &MonotonicityCertificate) -> Self {
        BoundConstants {
            l_f,
            m_scalar: radius + 1.0,
            k_a: rho.map_or(0.5, |r| r.k_a),
            rho,
            alpha: cert.alpha,
            beta: cert.beta,
        }
    }

    pub fn constrained(&self) -> bool {
        self.rho.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaVariant {
    /// `(4L_f + 1)·K_A·max(D, δ̄) + (2M + 1)·ε̄`.
    Full,
    /// `2L_f·δ̄`, valid without aggregate constraint when `D = ε̄ = 0`.
    Reduced,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoreticalBounds {
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub variant: OmegaVariant,
    /// The full form with `(2M + δ̄)ε̄` in place of `(2M + 1)ε̄`, for comparison.
    #[serde(rename = "Omega_alt")]
    pub omega_alt: f64,
    /// `max(δ̄, D) < ρ` (always true without an aggregate constraint).
    pub applicable: bool,
    pub bound_agg: Option<f64>,
    pub bound_profile: Option<f64>,
    /// Why a bound is absent.
    pub notes: Vec<String>,
}

/// `Ω` of the error bound, with `ε̄` replaced by `ε̄ + λ̄` by the caller for
/// Nash equilibria.
pub fn omega(delta_bar: f64, eps_bar: f64, d: f64, constants: &BoundConstants) -> (f64, OmegaVariant) {
    if !constants.constrained() && d == 0.0 && eps_bar == 0.0 {
        return (2.0 * constants.l_f * delta_bar, OmegaVariant::Reduced);
    }
    let d = if constants.constrained() { d } else { 0.0 };
    let omega = (4.0 * constants.l_f + 1.0) * constants.k_a * d.max(delta_bar)
        + (2.0 * constants.m_scalar + 1.0) * eps_bar;
    (omega, OmegaVariant::Full)
}

/// Square roots of the aggregate and profile error bounds,
/// `√(Ω/β)` and `√(Ω/α)`.
pub fn theoretical_bounds(metrics: &ApproxMetrics, constants: &BoundConstants) -> TheoreticalBounds {
    bounds_with_lambda(metrics, constants, 0.0)
}

/// [`theoretical_bounds`] for Nash equilibria of the atomic game, where the
/// own-impact distance `λ̄` adds to `ε̄`.
pub fn bounds_with_lambda(
    metrics: &ApproxMetrics,
    constants: &BoundConstants,
    lambda_bar: f64,
) -> TheoreticalBounds {
    let eps = metrics.eps_bar + lambda_bar;
    let (omega, variant) = omega(metrics.delta_bar, eps, metrics.d, constants);
    let d = if constants.constrained() { metrics.d } else { 0.0 };
    let omega_alt = (4.0 * constants.l_f + 1.0) * constants.k_a * d.max(metrics.delta_bar)
        + (2.0 * constants.m_scalar + metrics.delta_bar) * eps;
    let mut notes = Vec::new();
    let applicable = match constants.rho {
        None => true,
        Some(rho) => metrics.delta_bar.max(metrics.d) < rho.rho_min,
    };
    if !applicable {
        notes.push("max(delta_bar, D) is not below rho_min".to_string());
    }
    let root = |modulus: f64, what: &str, notes: &mut Vec<String>| {
        if !applicable {
            None
        } else if modulus > 0.0 {
            Some((omega / modulus).sqrt())
        } else {
            notes.push(format!("not {what} monotone"));
            None
        }
    };
    let bound_agg = root(constants.beta, "aggregatively strongly", &mut notes);
    let bound_profile = root(constants.alpha, "strongly", &mut notes);
    TheoreticalBounds {
        omega,
        variant,
        omega_alt,
        applicable,
        bound_agg,
        bound_profile,
        notes,
    }
}

/// `λᵢ = μᵢ‖C‖₂(R+1)√T`, the largest own-impact term `μᵢCᵀxᵢ` over `M`.
pub fn lambda_bar(masses: &[f64], c_norm: f64, radius: f64, dim: usize) -> f64 {
    let mu_max = masses.iter().copied().fold(0.0, f64::max);
    mu_max * c_norm * (radius + 1.0) * (dim as f64).sqrt()
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub nu: usize,
    #[serde(rename = "I")]
    pub num_types: usize,
    pub delta_bar: f64,
    pub eps_bar: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub lambda_bar: Option<f64>,
    #[serde(rename = "L_f")]
    pub l_f: f64,
    #[serde(rename = "K_A")]
    pub k_a: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub err_agg: Option<f64>,
    pub bound_agg: Option<f64>,
    pub err_profile: Option<f64>,
    pub bound_profile: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub applicable: bool,
}

impl ConvergenceRow {
    pub const HEADER: [&'static str; 18] = [
        "nu",
        "I",
        "delta_bar",
        "eps_bar",
        "D",
        "lambda_bar",
        "L_f",
        "K_A",
        "alpha",
        "beta",
        "Omega",
        "err_agg",
        "bound_agg",
        "err_profile",
        "bound_profile",
        "iterations",
        "residual",
        "applicable",
    ];

    /// Fields in [`HEADER`](Self::HEADER) order; floats with 17 significant
    /// digits, absent values empty.
    pub fn record(&self) -> Vec<String> {
        let f = |v: f64| format!("{v:.16e}");
        let o = |v: Option<f64>| v.map(f).unwrap_or_default();
        vec![
            self.nu.to_string(),
            self.num_types.to_string(),
            f(self.delta_bar),
            f(self.eps_bar),
            f(self.d),
            o(self.lambda_bar),
            f(self.l_f),
            f(self.k_a),
            f(self.alpha),
            f(self.beta),
            f(self.omega),
            o(self.err_agg),
            o(self.bound_agg),
            o(self.err_profile),
            o(self.bound_profile),
            self.iterations.to_string(),
            f(self.residual),
            self.applicable.to_string(),
        ]
    }
}
