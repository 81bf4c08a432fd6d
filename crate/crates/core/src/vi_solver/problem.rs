use serde::Serialize;

use crate::error::{Error, Result};
use crate::game_model::{monotonicity_certificate, FiniteTypeGame, MonotonicityCertificate, TypeCost};
use crate::linalg::{self, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    /// Symmetric variational Wardrop equilibrium: players ignore their own
    /// impact on the aggregate.
    Svwe,
    /// Variational Nash equilibrium of the atomic game in which type `i` is one
    /// player of weight `μᵢ`.
    Vne,
}

/// Monotone VI over the coupled set of a finite-type game.
///
/// The operator is `Fᵢ(x) = μᵢ·∇₁fᵢ(xᵢ, X)` for [`EquilibriumKind::Svwe`] and
/// `Fᵢ(x) = μᵢ·(∇₁fᵢ(xᵢ, X) + μᵢCᵀxᵢ)` for [`EquilibriumKind::Vne`].
#[derive(Debug, Clone)]
pub struct ViProblem<'a> {
    game: &'a FiniteTypeGame,
    kind: EquilibriumKind,
    lipschitz: f64,
    certificate: MonotonicityCertificate,
}

impl<'a> ViProblem<'a> {
    /// Refuses games without a monotonicity certificate.
    pub fn svwe(game: &'a FiniteTypeGame) -> Result<Self> {
        let certificate = monotonicity_certificate(game);
        if !certificate.class.is_monotone() {
            return Err(Error::NotMonotone {
                alpha: certificate.alpha,
                beta: certificate.beta,
            });
        }
        Ok(ViProblem {
            game,
            kind: EquilibriumKind::Svwe,
            lipschitz: svwe_lipschitz(game),
            certificate,
        })
    }

    /// Requires quadratic costs, convex atomic costs
    /// (`Sᵢ + μᵢ(C + Cᵀ) ⪰ 0`) and a monotone game.
    pub fn vne(game: &'a FiniteTypeGame) -> Result<Self> {
        if !game.is_quadratic() {
            return Err(Error::Unsupported(
                "variational Nash equilibria need the quadratic cost family".into(),
            ));
        }
        for (i, (cost, &m)) in game.costs().iter().zip(game.masses()).enumerate() {
            let cp = cost.as_quadratic().expect("quadratic");
            let c = &cp.price_slope;
            let hess = &cp.curvature + (c + c.transpose()) * m;
            let min_eig = linalg::min_sym_eigenvalue(&hess);
            let scale = linalg::spectral_norm(&hess).max(f64::MIN_POSITIVE);
            if min_eig < -1e-12 * scale {
                return Err(Error::NotConvex { player: i, min_eig });
            }
        }
        let certificate = monotonicity_certificate(game);
        if !certificate.class.is_monotone() {
            return Err(Error::NotMonotone {
                alpha: certificate.alpha,
                beta: certificate.beta,
            });
        }
        let c_norm = game
            .price_map()
            .map(|(c, _)| linalg::spectral_norm(c))
            .unwrap_or(0.0);
        let mu_max = game.masses().iter().copied().fold(0.0, f64::max);
        Ok(ViProblem {
            game,
            kind: EquilibriumKind::Vne,
            lipschitz: svwe_lipschitz(game) + mu_max * mu_max * c_norm,
            certificate,
        })
    }

    pub fn game(&self) -> &FiniteTypeGame {
        self.game
    }

    pub fn kind(&self) -> EquilibriumKind {
        self.kind
    }

    /// Upper bound on the Lipschitz constant of `F`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn certificate(&self) -> &MonotonicityCertificate {
        &self.certificate
    }

    pub fn operator(&self, x: &Vector) -> Vector {
        let game = self.game;
        let t = game.dim();
        let mut f = game.gradients(x);
        for (i, &m) in game.masses().iter().enumerate() {
            let mut blk = f.rows_mut(i * t, t);
            if self.kind == EquilibriumKind::Vne {
                if let Some(cp) = game.costs()[i].as_quadratic() {
                    let own = cp.price_slope.transpose() * x.rows(i * t, t) * m;
                    blk += own;
                }
            }
            blk *= m;
        }
        f
    }
}

/// `‖J‖ ≤ maxᵢ μᵢ‖Sᵢ‖ + ‖μ‖²‖C‖` for the quadratic family, where
/// `J = diag(μᵢSᵢ) + (μμᵀ) ⊗ C`. Custom oracles with joint Lipschitz constant
/// `Lᵢ` give `√2·maxᵢLᵢ·√(max μᵢ² + ‖μ‖⁴)`.
fn svwe_lipschitz(game: &FiniteTypeGame) -> f64 {
    let mu = game.masses();
    let mu_sq: f64 = mu.iter().map(|m| m * m).sum();
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    let c_norm = game
        .price_map()
        .map(|(c, _)| linalg::spectral_norm(c))
        .unwrap_or(0.0);
    let mut quad: f64 = 0.0;
    let mut custom: f64 = 0.0;
    for (cost, &m) in game.costs().iter().zip(mu) {
        match cost {
            TypeCost::Quadratic(cp) => quad = quad.max(m * linalg::spectral_norm(&cp.curvature)),
            TypeCost::Custom(g) => custom = custom.max(g.lipschitz()),
        }
    }
    let mut l = quad + mu_sq * c_norm;
    if custom > 0.0 {
        l = l.max(std::f64::consts::SQRT_2 * custom * (mu_max * mu_max + mu_sq * mu_sq).sqrt());
    }
    l
}
