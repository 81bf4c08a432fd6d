//! Thin wrapper over `minilp` for the feasibility, bounding-box and
//! Chebyshev-center linear programs used across the crate.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Relation {
    Le,
    Eq,
}

/// Sparse row `Σ coeffs[k].1 · x[coeffs[k].0]  (<= | ==)  rhs`.
#[derive(Debug, Clone)]
pub(crate) struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LpRow {
    pub fn dense(coeffs: &[f64], offset: usize, relation: Relation, rhs: f64) -> Self {
        LpRow {
            coeffs: coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(j, &c)| (j + offset, c))
                .collect(),
            relation,
            rhs,
        }
    }
}

/// Linear program over `n` free variables (individual bounds optional).
pub(crate) struct LinearProgram {
    pub n: usize,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            n,
            rows: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn push(&mut self, row: LpRow) {
        self.rows.push(row);
    }

    /// Maximizes `objective · x`. `Err(Infeasible)` / `Err(Unbounded)` map the LP status.
    pub fn maximize(&self, objective: &[f64]) -> Result<Vec<f64>> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..self.n)
            .map(|j| problem.add_var(objective.get(j).copied().unwrap_or(0.0), self.bounds[j]))
            .collect();
        for row in &self.rows {
            let expr: Vec<_> = row.coeffs.iter().map(|&(j, c)| (vars[j], c)).collect();
            let op = match row.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(expr.as_slice(), op, row.rhs);
        }
        match problem.solve() {
            // minilp reports some unbounded directions as infinite solutions
            Ok(sol) if !sol.objective().is_finite() => Err(Error::Unbounded),
            Ok(sol) => {
                let x: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
                if x.iter().all(|v| v.is_finite()) {
                    Ok(x)
                } else {
                    Err(Error::Unbounded)
                }
            }
            Err(minilp::Error::Infeasible) => Err(Error::Infeasible),
            Err(minilp::Error::Unbounded) => Err(Error::Unbounded),
        }
    }

    pub fn feasible_point(&self) -> Result<Vec<f64>> {
        self.maximize(&[])
    }
}
