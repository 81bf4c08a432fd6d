use serde::Serialize;

use crate::linalg;

use super::{FiniteTypeGame, TypeCharacteristic, TypeCost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotonicityClass {
    None,
    Monotone,
    Strongly,
    AggregativelyStrongly,
    StronglyAndAggregatively,
}

impl MonotonicityClass {
    pub fn is_monotone(self) -> bool {
        self != MonotonicityClass::None
    }
}

/// Analytic moduli of the public-products game: `alpha = minᵢ λmin(Sᵢ)`,
/// `beta = λmin((C + Cᵀ)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityCertificate {
    pub class: MonotonicityClass,
    pub alpha: f64,
    pub beta: f64,
}

impl MonotonicityCertificate {
    pub fn profile_unique(&self) -> bool {
        matches!(
            self.class,
            MonotonicityClass::Strongly | MonotonicityClass::StronglyAndAggregatively
        )
    }

    pub fn aggregate_unique(&self) -> bool {
        self.class != MonotonicityClass::None && self.class != MonotonicityClass::Monotone
    }
}

pub fn monotonicity_certificate(game: &FiniteTypeGame) -> MonotonicityCertificate {
    let mut alpha = f64::INFINITY;
    let mut beta = f64::INFINITY;
    let mut scale = 0.0_f64;
    if let Some((c, _)) = game.price_map() {
        beta = linalg::min_sym_eigenvalue(c);
        scale = scale.max(linalg::spectral_norm(c));
    }
    for cost in game.costs() {
        match cost {
            TypeCost::Quadratic(cp) => {
                alpha = alpha.min(linalg::min_sym_eigenvalue(&cp.curvature));
                scale = scale.max(linalg::spectral_norm(&cp.curvature));
            }
            TypeCost::Custom(g) => {
                let (a, b) = g.moduli();
                alpha = alpha.min(a);
                beta = beta.min(b);
                scale = scale.max(g.lipschitz());
            }
        }
    }
    classify(alpha, beta, scale)
}

/// Certificate of the continuum game, with the minimum over types replaced by
/// the minimum over `samples` points of every continuity piece.
pub fn characteristic_certificate(tc: &TypeCharacteristic, samples: usize) -> MonotonicityCertificate {
    let c = tc.price_slope();
    let beta = linalg::min_sym_eigenvalue(c);
    let mut scale = linalg::spectral_norm(c);
    let mut alpha = f64::INFINITY;
    let n = samples.max(2);
    for (k, piece) in tc.pieces().iter().enumerate() {
        for j in 0..n {
            let theta = piece.start + (piece.end - piece.start) * j as f64 / (n - 1) as f64;
            let (s, _) = tc.utility_in_piece(k, theta);
            alpha = alpha.min(linalg::min_sym_eigenvalue(&s));
            scale = scale.max(linalg::spectral_norm(&s));
        }
    }
    classify(alpha, beta, scale)
}

/// Moduli within `1e-12·scale` of zero are treated as zero.
fn classify(alpha: f64, beta: f64, scale: f64) -> MonotonicityCertificate {
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let snap = |v: f64| if v.abs() <= eps { 0.0 } else { v };
    let alpha = snap(alpha);
    let beta = snap(beta);

    let class = if alpha < 0.0 || beta < 0.0 {
        MonotonicityClass::None
    } else {
        match (alpha > 0.0, beta > 0.0) {
            (true, true) => MonotonicityClass::StronglyAndAggregatively,
            (true, false) => MonotonicityClass::Strongly,
            (false, true) => MonotonicityClass::AggregativelyStrongly,
            (false, false) => MonotonicityClass::Monotone,
        }
    };
    MonotonicityCertificate { class, alpha, beta }
}
