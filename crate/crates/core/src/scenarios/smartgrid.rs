use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game_model::{CharacteristicPiece, CostParams, FiniteTypeGame, PolytopeSet, TypeCharacteristic};
use crate::linalg::{Matrix, Vector};

/// Households with flexible energy `E_θ = θ·N·E_max` to split between an
/// off-peak (`O`) and a peak (`P`) period, priced `c(X) = (a_O X_O, a_P X_P)/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmartGridScenario {
    #[serde(rename = "aO")]
    pub a_o: f64,
    #[serde(rename = "aP")]
    pub a_p: f64,
    #[serde(rename = "Emax")]
    pub e_max: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl Default for SmartGridScenario {
    fn default() -> Self {
        SmartGridScenario {
            a_o: 1.0,
            a_p: 2.0,
            e_max: 20.0,
            n: 3e7,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SvweError {
    #[serde(rename = "X_hat")]
    pub x_hat: Vec<f64>,
    pub err: f64,
    pub bound: f64,
}

impl SmartGridScenario {
    pub fn new(a_o: f64, a_p: f64, e_max: f64, n: f64) -> Result<Self> {
        let sc = SmartGridScenario { a_o, a_p, e_max, n };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_o > 0.0 && self.a_p > self.a_o) {
            return Err(Error::contract("smart grid needs a_P > a_O > 0"));
        }
        if !(self.e_max > 0.0 && self.n > 0.0) {
            return Err(Error::contract("smart grid needs E_max > 0 and N > 0"));
        }
        Ok(())
    }

    /// `E_tot = ∫ E_θ dθ = N·E_max/2`.
    pub fn e_tot(&self) -> f64 {
        0.5 * self.n * self.e_max
    }

    pub fn price_slope(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_vec(vec![self.a_o / self.n, self.a_p / self.n]))
    }

    pub fn cost(&self) -> CostParams {
        CostParams::pricing_only(self.price_slope(), Vector::zeros(2)).expect("2x2 price map")
    }

    /// `{x ∈ R²₊ : x_O + x_P = E}`.
    pub fn action_set(&self, energy: f64) -> Result<PolytopeSet> {
        PolytopeSet::simplex(2, energy)
    }

    pub fn characteristic(&self) -> Result<TypeCharacteristic> {
        let scale = self.n * self.e_max;
        let piece = CharacteristicPiece {
            start: 0.0,
            end: 1.0,
            rhs: Arc::new(move |th| Vector::from_vec(vec![0.0, 0.0, th * scale])),
            utility: Arc::new(|_| (Matrix::zeros(2, 2), Vector::zeros(2))),
        };
        // the largest set is the simplex at θ = 1, whose farthest points are its vertices
        Ok(TypeCharacteristic::new(
            &self.action_set(scale)?,
            self.price_slope(),
            Vector::zeros(2),
            vec![piece],
        )?
        .with_radius(scale))
    }

    /// `I` types of mass `1/I` with budgets `Eᵢ = (i/I)·N·E_max`.
    pub fn build(&self, types: usize) -> Result<FiniteTypeGame> {
        if types == 0 {
            return Err(Error::contract("the smart grid needs at least one type"));
        }
        let mut sets = Vec::with_capacity(types);
        for i in 1..=types {
            sets.push(self.action_set(i as f64 / types as f64 * self.n * self.e_max)?);
        }
        let cost = self.cost();
        FiniteTypeGame::new(
            vec![1.0 / types as f64; types],
            sets,
            vec![cost.into(); types],
            None,
        )
    }

    /// Aggregate equilibrium of the continuum game:
    /// `X* = (a_P, a_O)·E_tot/(a_O + a_P)`.
    pub fn analytic_vwe(&self) -> Vector {
        let s = self.a_o + self.a_p;
        Vector::from_vec(vec![self.a_p / s * self.e_tot(), self.a_o / s * self.e_tot()])
    }

    /// `X̂ᴵ = (1 + 1/I)X*`, its distance `‖X*‖/I` to `X*`, and the bound
    /// `2E_tot√(a_P/a_O)/√I`.
    pub fn analytic_svwe_error(&self, types: usize) -> SvweError {
        let x_star = self.analytic_vwe();
        let i = types as f64;
        SvweError {
            x_hat: (&x_star * (1.0 + 1.0 / i)).iter().copied().collect(),
            err: x_star.norm() / i,
            bound: 2.0 * self.e_tot() * (self.a_p / self.a_o).sqrt() / i.sqrt(),
        }
    }

    /// `L_f = max_{X ∈ Y} ‖c(X)‖ = (a_P/N)·E_tot`.
    pub fn lf(&self) -> f64 {
        self.a_p / self.n * self.e_tot()
    }

    /// Aggregate monotonicity modulus `β = a_O/N`.
    pub fn beta(&self) -> f64 {
        self.a_o / self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scenario_values() {
        let sc = SmartGridScenario::default();
        assert_eq!(sc.e_tot(), 3e8);
        assert_eq!(sc.analytic_vwe(), Vector::from_vec(vec![2e8, 1e8]));
        let e = sc.analytic_svwe_error(10);
        assert!((e.err - 5f64.sqrt() / 3.0 * 3e7).abs() < 1e-6);
    }

    #[test]
    fn symmetric_prices_split_evenly() {
        let sc = SmartGridScenario {
            a_o: 1.0,
            a_p: 1.0,
            ..SmartGridScenario::default()
        };
        let x = sc.analytic_vwe();
        assert_eq!(x[0], x[1]);
        assert!(sc.validate().is_err());
    }

    #[test]
    fn budgets_use_right_endpoints() {
        let sc = SmartGridScenario::default();
        let g = sc.build(2).unwrap();
        let budgets: Vec<f64> = g.sets().iter().map(|s| s.e()[0]).collect();
        assert_eq!(budgets, vec![0.5 * 6e8, 6e8]);
        let mean: f64 = budgets.iter().zip(g.masses()).map(|(e, m)| e * m).sum();
        assert!((mean - sc.e_tot() * 1.5).abs() < 1e-6);
        assert_eq!(sc.build(1).unwrap().sets()[0].e()[0], 6e8);
    }
}
