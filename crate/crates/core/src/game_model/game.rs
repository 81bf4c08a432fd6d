use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::lp::{LinearProgram, LpRow, Relation};

use super::{PolytopeSet, TypeCost};

/// Finite-type nonatomic aggregative game `((μᵢ), (Xᵢ), (fᵢ), A)`.
///
/// Action profiles are stacked: type `i` occupies entries `i·T .. (i+1)·T`.
#[derive(Debug, Clone)]
pub struct FiniteTypeGame {
    dim: usize,
    masses: Vec<f64>,
    sets: Vec<PolytopeSet>,
    costs: Vec<TypeCost>,
    constraint: Option<PolytopeSet>,
}

pub(crate) const MASS_TOLERANCE: f64 = 1e-9;

impl FiniteTypeGame {
    /// Validates dimensions, normalizes the masses to sum to one and checks that
    /// the coupled set `{x ∈ ΠXᵢ : Σμᵢxᵢ ∈ A}` is nonempty.
    pub fn new(
        masses: Vec<f64>,
        sets: Vec<PolytopeSet>,
        costs: Vec<TypeCost>,
        constraint: Option<PolytopeSet>,
    ) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::contract("a game needs at least one type"));
        }
        check_dim(masses.len(), sets.len())?;
        check_dim(masses.len(), costs.len())?;
        let dim = sets[0].dim();
        for (set, cost) in sets.iter().zip(&costs) {
            check_dim(dim, set.dim())?;
            check_dim(dim, cost.dim())?;
        }
        if let Some(a) = &constraint {
            check_dim(dim, a.dim())?;
        }
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::contract("type masses must be positive and finite"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::contract(format!(
                "type masses sum to {total}, expected 1"
            )));
        }
        let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();

        let quad: Vec<_> = costs.iter().filter_map(|c| c.as_quadratic()).collect();
        if let Some(first) = quad.first() {
            if quad.iter().any(|c| {
                c.price_slope != first.price_slope || c.base_price != first.base_price
            }) {
                return Err(Error::Unsupported(
                    "quadratic costs must share the price map c(X) = C X + d".into(),
                ));
            }
        }

        let game = FiniteTypeGame {
            dim,
            masses,
            sets,
            costs,
            constraint,
        };
        game.coupled_feasible_point()?;
        Ok(game)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_types(&self) -> usize {
        self.masses.len()
    }

    pub fn stacked_dim(&self) -> usize {
        self.dim * self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn sets(&self) -> &[PolytopeSet] {
        &self.sets
    }

    pub fn costs(&self) -> &[TypeCost] {
        &self.costs
    }

    pub fn constraint(&self) -> Option<&PolytopeSet> {
        self.constraint.as_ref()
    }

    /// Largest bounding radius over the action sets.
    pub fn radius(&self) -> f64 {
        self.sets.iter().map(|s| s.radius()).fold(0.0, f64::max)
    }

    /// Shared price map `(C, d)` when at least one type is quadratic.
    pub fn price_map(&self) -> Option<(&Matrix, &Vector)> {
        self.costs
            .iter()
            .find_map(|c| c.as_quadratic())
            .map(|cp| (&cp.price_slope, &cp.base_price))
    }

    pub fn is_quadratic(&self) -> bool {
        self.costs.iter().all(|c| c.as_quadratic().is_some())
    }

    pub fn block(&self, x: &Vector, i: usize) -> Vector {
        x.rows(i * self.dim, self.dim).into_owned()
    }

    /// Aggregate `Σ μᵢ xᵢ` of a stacked profile.
    pub fn aggregate(&self, x: &Vector) -> Vector {
        let mut agg = Vector::zeros(self.dim);
        for (i, &m) in self.masses.iter().enumerate() {
            agg += x.rows(i * self.dim, self.dim) * m;
        }
        agg
    }

    pub fn stack(&self, blocks: &[Vector]) -> Vector {
        let mut x = Vector::zeros(self.stacked_dim());
        for (i, b) in blocks.iter().enumerate() {
            x.rows_mut(i * self.dim, self.dim).copy_from(b);
        }
        x
    }

    /// Per-type gradients `gᵢ(x) = ∇₁fᵢ(xᵢ, Σμⱼxⱼ)`, stacked.
    pub fn gradients(&self, x: &Vector) -> Vector {
        let agg = self.aggregate(x);
        let mut g = Vector::zeros(self.stacked_dim());
        for (i, cost) in self.costs.iter().enumerate() {
            let gi = cost.gradient(&self.block(x, i), &agg);
            g.rows_mut(i * self.dim, self.dim).copy_from(&gi);
        }
        g
    }

    /// Euclidean norm of the violation of `x ∈ ΠXᵢ` and `Σμᵢxᵢ ∈ A`.
    pub fn violation(&self, x: &Vector) -> f64 {
        let mut sq = 0.0;
        for (i, set) in self.sets.iter().enumerate() {
            sq += set.violation(&self.block(x, i)).powi(2);
        }
        if let Some(a) = &self.constraint {
            sq += a.violation(&self.aggregate(x)).powi(2);
        }
        sq.sqrt()
    }

    /// Tolerance scale for feasibility checks on this game.
    pub fn scale(&self) -> f64 {
        1.0 + self.radius()
    }

    /// Some point of the coupled set, found by LP.
    pub fn coupled_feasible_point(&self) -> Result<Vector> {
        let lp = self.coupled_lp(0);
        let x = lp.feasible_point()?;
        Ok(Vector::from_vec(x))
    }

    /// LP over the stacked profile (plus `extra` trailing variables) encoding the
    /// coupled feasible set.
    pub(crate) fn coupled_lp(&self, extra: usize) -> LinearProgram {
        let t = self.dim;
        let mut lp = LinearProgram::new(self.stacked_dim() + extra);
        for (i, set) in self.sets.iter().enumerate() {
            for row in set.lp_rows(i * t) {
                lp.push(row);
            }
        }
        if let Some(a) = &self.constraint {
            for row in aggregate_rows(a, &self.masses, t) {
                lp.push(row);
            }
        }
        lp
    }
}

/// Rows of `A` expressed on the stacked profile through `X = Σ μᵢ xᵢ`.
pub(crate) fn aggregate_rows(a: &PolytopeSet, masses: &[f64], t: usize) -> Vec<LpRow> {
    let mut rows = Vec::new();
    let mut push = |coeffs: Vec<f64>, relation: Relation, rhs: f64| {
        let mut stacked = Vec::with_capacity(masses.len() * t);
        for (i, &m) in masses.iter().enumerate() {
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    stacked.push((i * t + k, m * c));
                }
            }
        }
        rows.push(LpRow {
            coeffs: stacked,
            relation,
            rhs,
        });
    };
    for k in 0..a.p().nrows() {
        push(a.p().row(k).iter().copied().collect(), Relation::Le, a.b()[k]);
    }
    for k in 0..a.q().nrows() {
        push(a.q().row(k).iter().copied().collect(), Relation::Eq, a.e()[k]);
    }
    rows
}
