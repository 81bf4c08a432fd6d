use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Result};
use crate::linalg::{Matrix, Vector};

/// Parameters of the public-products cost
/// `f(x, X) = ⟨x, C X + d⟩ − ⟨r, x⟩ + ½ xᵀ S x`.
///
/// `C X + d` is the per-unit price of the `T` products given the aggregate `X`;
/// the private utility `⟨r, x⟩ − ½ xᵀ S x` is concave when `S` is positive
/// semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct CostParams {
    pub price_slope: Matrix,
    pub base_price: Vector,
    pub curvature: Matrix,
    pub utility_slope: Vector,
}

impl CostParams {
    pub fn new(
        price_slope: Matrix,
        base_price: Vector,
        curvature: Matrix,
        utility_slope: Vector,
    ) -> Result<Self> {
        let t = price_slope.nrows();
        check_dim(t, price_slope.ncols())?;
        check_dim(t, base_price.len())?;
        check_dim(t, curvature.nrows())?;
        check_dim(t, curvature.ncols())?;
        check_dim(t, utility_slope.len())?;
        Ok(CostParams {
            price_slope,
            base_price,
            curvature,
            utility_slope,
        })
    }

    /// Pure price cost `⟨x, C X + d⟩` (no private utility).
    pub fn pricing_only(price_slope: Matrix, base_price: Vector) -> Result<Self> {
        let t = price_slope.nrows();
        Self::new(price_slope, base_price, Matrix::zeros(t, t), Vector::zeros(t))
    }

    pub fn dim(&self) -> usize {
        self.base_price.len()
    }

    /// `c(X) = C X + d`.
    pub fn price(&self, agg: &Vector) -> Vector {
        &self.price_slope * agg + &self.base_price
    }

    pub fn eval_cost(&self, x: &Vector, agg: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), agg.len())?;
        Ok(x.dot(&self.price(agg)) - self.utility_slope.dot(x)
            + 0.5 * x.dot(&(&self.curvature * x)))
    }

    /// Gradient in the own action: `C X + d − r + S x`.
    pub fn eval_grad(&self, x: &Vector, agg: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), agg.len())?;
        Ok(self.grad_unchecked(x, agg))
    }

    pub(crate) fn grad_unchecked(&self, x: &Vector, agg: &Vector) -> Vector {
        self.price(agg) - &self.utility_slope + &self.curvature * x
    }

    /// Packs the type-dependent part `(S row-major, r)`.
    pub fn packed_params(&self) -> Vector {
        let t = self.dim();
        let mut v = Vector::zeros(t * t + t);
        for i in 0..t {
            for j in 0..t {
                v[i * t + j] = self.curvature[(i, j)];
            }
        }
        v.rows_mut(t * t, t).copy_from(&self.utility_slope);
        v
    }
}

/// Black-box own-action gradient `(x, X) ↦ ∇₁f(x, X)` for costs outside the
/// quadratic family. Implementors declare a Lipschitz bound for the resulting
/// operator and the monotonicity moduli they guarantee.
pub trait GradientOracle: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn gradient(&self, x: &Vector, agg: &Vector) -> Vector;
    /// Lipschitz constant of `(x, X) ↦ ∇₁f(x, X)`.
    fn lipschitz(&self) -> f64;
    /// Declared `(alpha, beta)`; negative values mean "no guarantee".
    fn moduli(&self) -> (f64, f64);
}

#[derive(Debug, Clone)]
pub enum TypeCost {
    Quadratic(CostParams),
    Custom(Arc<dyn GradientOracle>),
}

impl TypeCost {
    pub fn dim(&self) -> usize {
        match self {
            TypeCost::Quadratic(cp) => cp.dim(),
            TypeCost::Custom(g) => g.dim(),
        }
    }

    pub fn gradient(&self, x: &Vector, agg: &Vector) -> Vector {
        match self {
            TypeCost::Quadratic(cp) => cp.grad_unchecked(x, agg),
            TypeCost::Custom(g) => g.gradient(x, agg),
        }
    }

    pub fn as_quadratic(&self) -> Option<&CostParams> {
        match self {
            TypeCost::Quadratic(cp) => Some(cp),
            TypeCost::Custom(_) => None,
        }
    }
}

impl From<CostParams> for TypeCost {
    fn from(cp: CostParams) -> Self {
        TypeCost::Quadratic(cp)
    }
}
