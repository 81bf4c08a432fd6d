use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Vector};

use super::{CostParams, PolytopeSet};

/// `θ ↦ (b(θ), e(θ))`, stacked right-hand sides of the action-set constraints.
pub type RhsMap = Arc<dyn Fn(f64) -> Vector + Send + Sync>;
/// `θ ↦ (S(θ), r(θ))`, the type-dependent private-utility parameters.
pub type UtilityMap = Arc<dyn Fn(f64) -> (Matrix, Vector) + Send + Sync>;

/// One continuity piece `[start, end]` of a characteristic. The maps are
/// evaluated on the closed interval so that both one-sided limits at a
/// discontinuity are available.
#[derive(Clone)]
pub struct CharacteristicPiece {
    pub start: f64,
    pub end: f64,
    pub rhs: RhsMap,
    pub utility: UtilityMap,
}

impl fmt::Debug for CharacteristicPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacteristicPiece")
            .field("start", &self.start)
            .field("end", &self.end)
            .finish_non_exhaustive()
    }
}

/// Piecewise-continuous player characteristic over `Θ = [0, 1]`.
///
/// Action sets share `P` and `Q`: `X_θ = {x : P x ≤ b(θ), Q x = e(θ)}`. Costs share
/// the price map `C X + d` and differ through `(S(θ), r(θ))`.
#[derive(Debug, Clone)]
pub struct TypeCharacteristic {
    template: PolytopeSet,
    price_slope: Matrix,
    base_price: Vector,
    pieces: Vec<CharacteristicPiece>,
    radius: f64,
}

const RADIUS_SAMPLES: usize = 65;

impl TypeCharacteristic {
    /// `template` fixes `P` and `Q` (its own right-hand sides are not used).
    /// The bounding radius is the largest set radius over a grid of `θ` on
    /// every piece; use [`with_radius`](Self::with_radius) to supply a proven bound.
    pub fn new(
        template: &PolytopeSet,
        price_slope: Matrix,
        base_price: Vector,
        pieces: Vec<CharacteristicPiece>,
    ) -> Result<Self> {
        let t = template.dim();
        check_dim(t, price_slope.nrows())?;
        check_dim(t, price_slope.ncols())?;
        check_dim(t, base_price.len())?;
        if pieces.is_empty() {
            return Err(Error::contract("characteristic needs at least one piece"));
        }
        if pieces[0].start != 0.0 || pieces.last().map(|p| p.end) != Some(1.0) {
            return Err(Error::contract("pieces must cover [0, 1]"));
        }
        for w in pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::contract("pieces must be contiguous"));
            }
        }
        if pieces.iter().any(|p| !(p.end > p.start)) {
            return Err(Error::contract("pieces must have positive length"));
        }
        let mut tc = TypeCharacteristic {
            template: template.clone(),
            price_slope,
            base_price,
            pieces,
            radius: 0.0,
        };
        let mut radius: f64 = 0.0;
        for (k, piece) in tc.pieces.iter().enumerate() {
            for j in 0..RADIUS_SAMPLES {
                let theta =
                    piece.start + (piece.end - piece.start) * j as f64 / (RADIUS_SAMPLES - 1) as f64;
                let rhs = (piece.rhs)(theta);
                check_dim(tc.num_rhs(), rhs.len())?;
                let (s, r) = (piece.utility)(theta);
                check_dim(t, s.nrows())?;
                check_dim(t, s.ncols())?;
                check_dim(t, r.len())?;
                radius = radius.max(tc.set_in_piece(k, theta)?.radius());
            }
        }
        tc.radius = radius;
        Ok(tc)
    }

    /// Characteristic that is the same for every `θ`.
    pub fn constant(set: &PolytopeSet, cost: &CostParams) -> Result<Self> {
        let rhs = set.rhs();
        let s = cost.curvature.clone();
        let r = cost.utility_slope.clone();
        let piece = CharacteristicPiece {
            start: 0.0,
            end: 1.0,
            rhs: Arc::new(move |_| rhs.clone()),
            utility: Arc::new(move |_| (s.clone(), r.clone())),
        };
        Self::new(
            set,
            cost.price_slope.clone(),
            cost.base_price.clone(),
            vec![piece],
        )
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn dim(&self) -> usize {
        self.template.dim()
    }

    pub fn template(&self) -> &PolytopeSet {
        &self.template
    }

    pub fn price_slope(&self) -> &Matrix {
        &self.price_slope
    }

    pub fn base_price(&self) -> &Vector {
        &self.base_price
    }

    pub fn pieces(&self) -> &[CharacteristicPiece] {
        &self.pieces
    }

    /// Interior discontinuity points `σ₁ < … < σ_K`.
    pub fn discontinuities(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.start).collect()
    }

    /// Number of stacked right-hand-side components `q + p`.
    pub fn num_rhs(&self) -> usize {
        self.template.num_constraints()
    }

    /// Number of packed utility parameters `T² + T`.
    pub fn num_utility_params(&self) -> usize {
        let t = self.dim();
        t * t + t
    }

    /// Bound on `‖x‖` over every action set.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Lipschitz constant of `s ↦ ∇₁f(x, Y; s)` on `M = [0, R+1]^T` for the
    /// packed parameters `s = (S, r)`: `‖ΔS x − Δr‖ ≤ √(m² + 1)·‖Δs‖` with
    /// `m = (R+1)√T`.
    pub fn lipschitz_l3(&self) -> f64 {
        let m = (self.radius + 1.0) * (self.dim() as f64).sqrt();
        (m * m + 1.0).sqrt()
    }

    /// Index of the piece containing `θ` (right-open, last piece closed).
    pub fn piece_index(&self, theta: f64) -> usize {
        self.pieces
            .iter()
            .position(|p| theta < p.end)
            .unwrap_or(self.pieces.len() - 1)
    }

    pub fn rhs_in_piece(&self, piece: usize, theta: f64) -> Vector {
        (self.pieces[piece].rhs)(theta)
    }

    pub fn utility_in_piece(&self, piece: usize, theta: f64) -> (Matrix, Vector) {
        (self.pieces[piece].utility)(theta)
    }

    pub fn rhs_at(&self, theta: f64) -> Vector {
        self.rhs_in_piece(self.piece_index(theta), theta)
    }

    pub fn utility_at(&self, theta: f64) -> (Matrix, Vector) {
        self.utility_in_piece(self.piece_index(theta), theta)
    }

    pub fn set_in_piece(&self, piece: usize, theta: f64) -> Result<PolytopeSet> {
        self.set_from_rhs(&self.rhs_in_piece(piece, theta))
    }

    pub fn set_at(&self, theta: f64) -> Result<PolytopeSet> {
        self.set_in_piece(self.piece_index(theta), theta)
    }

    pub fn set_from_rhs(&self, rhs: &Vector) -> Result<PolytopeSet> {
        let q = self.template.p().nrows();
        let p = self.template.q().nrows();
        check_dim(q + p, rhs.len())?;
        self.template
            .with_rhs(rhs.rows(0, q).into_owned(), rhs.rows(q, p).into_owned())
    }

    pub fn cost_from_utility(&self, s: Matrix, r: Vector) -> CostParams {
        CostParams {
            price_slope: self.price_slope.clone(),
            base_price: self.base_price.clone(),
            curvature: s,
            utility_slope: r,
        }
    }

    pub fn cost_in_piece(&self, piece: usize, theta: f64) -> CostParams {
        let (s, r) = self.utility_in_piece(piece, theta);
        self.cost_from_utility(s, r)
    }

    pub fn cost_at(&self, theta: f64) -> CostParams {
        self.cost_in_piece(self.piece_index(theta), theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> TypeCharacteristic {
        // X_θ = [0, θ + 1], two pieces with a jump of the utility slope at 0.5
        let template = PolytopeSet::interval(0.0, 1.0).unwrap();
        let mk = |start: f64, end: f64, jump: f64| CharacteristicPiece {
            start,
            end,
            rhs: Arc::new(|th| Vector::from_vec(vec![th + 1.0, 0.0])),
            utility: Arc::new(move |th| (Matrix::zeros(1, 1), Vector::from_vec(vec![th + jump]))),
        };
        TypeCharacteristic::new(
            &template,
            Matrix::identity(1, 1),
            Vector::zeros(1),
            vec![mk(0.0, 0.5, 0.0), mk(0.5, 1.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn piece_lookup_and_one_sided_limits() {
        let tc = ramp();
        assert_eq!(tc.discontinuities(), vec![0.5]);
        assert_eq!(tc.piece_index(0.25), 0);
        assert_eq!(tc.piece_index(0.5), 1);
        assert_eq!(tc.piece_index(1.0), 1);
        assert_eq!(tc.utility_in_piece(0, 0.5).1[0], 0.5);
        assert_eq!(tc.utility_in_piece(1, 0.5).1[0], 1.5);
    }

    #[test]
    fn radius_is_largest_sampled_set() {
        let tc = ramp();
        assert!((tc.radius() - 2.0).abs() < 1e-9);
        let m = 3.0;
        assert!((tc.lipschitz_l3() - (m * m + 1.0_f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn gaps_are_rejected() {
        let template = PolytopeSet::interval(0.0, 1.0).unwrap();
        let piece = CharacteristicPiece {
            start: 0.0,
            end: 0.9,
            rhs: Arc::new(|_| Vector::from_vec(vec![1.0, 0.0])),
            utility: Arc::new(|_| (Matrix::zeros(1, 1), Vector::zeros(1))),
        };
        assert!(TypeCharacteristic::new(
            &template,
            Matrix::identity(1, 1),
            Vector::zeros(1),
            vec![piece]
        )
        .is_err());
    }
}
