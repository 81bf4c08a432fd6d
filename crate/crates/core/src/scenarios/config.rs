//! JSON game descriptions.
//!
//! ```json
//! {
//!   "T": 2,
//!   "P": [[1, 0], [0, 1], [-1, 0], [0, -1]],
//!   "C": [[1, 0.5], [-0.5, 1]], "d": [0, 0],
//!   "A": {"P": [[1, 1]], "b": [1.2]},
//!   "types": [{"mu": 1.0, "b": [1, 1, 0, 0], "S": [[1, 0], [0, 1]], "r": [1, 1]}]
//! }
//! ```
//!
//! Instead of `types`, a `characteristic` gives piecewise-polynomial maps
//! `θ ↦ b(θ), e(θ), S(θ), r(θ)` (each entry is a number or a coefficient list
//! `[c₀, c₁, …]` for `Σ cₖθᵏ`), and `smartgrid` selects the built-in
//! flexible-energy scenario.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::approximation::{ApproxOptions, Endpoint};
use crate::error::{Error, Result};
use crate::game_model::{CharacteristicPiece, CostParams, FiniteTypeGame, PolytopeSet, TypeCharacteristic};
use crate::linalg::{self, Matrix, Vector};

use super::SmartGridScenario;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Poly {
    Const(f64),
    Coeffs(Vec<f64>),
}

impl Poly {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            Poly::Const(c) => *c,
            Poly::Coeffs(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * theta + c),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    #[serde(rename = "P", default)]
    pub p: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(rename = "Q", default)]
    pub q: Vec<Vec<f64>>,
    #[serde(default)]
    pub e: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeConfig {
    pub mu: f64,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub e: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Option<Vec<Vec<f64>>>,
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub from: f64,
    pub to: f64,
    #[serde(default)]
    pub b: Vec<Poly>,
    #[serde(default)]
    pub e: Vec<Poly>,
    #[serde(rename = "S")]
    pub s: Option<Vec<Vec<Poly>>>,
    pub r: Option<Vec<Poly>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Uniform,
    Meshgrid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacteristicConfig {
    #[serde(default)]
    pub method: Method,
    pub endpoint: Option<Endpoint>,
    pub theta_samples: Option<usize>,
    pub probes: Option<usize>,
    pub cell_cap: Option<u128>,
    /// Overrides the sampled bound on `‖x‖` over all action sets.
    pub radius: Option<f64>,
    pub pieces: Vec<PieceConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmartGridConfig {
    #[serde(flatten)]
    pub scenario: SmartGridScenario,
    /// Type count used by `solve`.
    #[serde(rename = "I")]
    pub types: Option<usize>,
}

/// Reference equilibrium of the continuum game for the error columns of a
/// sweep: a known aggregate, or the equilibrium of a fine uniform split.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub aggregate: Option<Vec<f64>>,
    pub nu: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    #[serde(rename = "T")]
    pub dim: Option<usize>,
    #[serde(rename = "P", default)]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "Q", default)]
    pub q: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Option<Vec<Vec<f64>>>,
    pub d: Option<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Option<ConstraintConfig>,
    pub types: Option<Vec<TypeConfig>>,
    pub characteristic: Option<CharacteristicConfig>,
    pub smartgrid: Option<SmartGridConfig>,
    pub reference: Option<ReferenceConfig>,
}

/// What a config describes.
#[derive(Debug, Clone)]
pub enum Scenario {
    Finite(FiniteTypeGame),
    Characteristic {
        tc: TypeCharacteristic,
        constraint: Option<PolytopeSet>,
        method: Method,
        options: ApproxOptions,
    },
    SmartGrid {
        scenario: SmartGridScenario,
        types: Option<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub scenario: Scenario,
    pub reference: Option<ReferenceConfig>,
}

fn invalid(message: impl Into<String>) -> Error {
    Error::Config {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let cfg: GameConfig = serde_json::from_str(text).map_err(|e| {
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        Error::Config {
            line: e.line(),
            column: e.column(),
            message: message.strip_suffix(&suffix).unwrap_or(&message).to_string(),
        }
    })?;
    cfg.into_loaded()
}

fn matrix(rows: &[Vec<f64>], ncols: usize, what: &str) -> Result<Matrix> {
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(invalid(format!("every row of {what} needs {ncols} entries")));
    }
    Ok(linalg::from_rows(rows, ncols))
}

fn vector(v: &[f64], len: usize, what: &str) -> Result<Vector> {
    if v.len() != len {
        return Err(invalid(format!("{what} needs {len} entries, got {}", v.len())));
    }
    Ok(Vector::from_column_slice(v))
}

/// `A`, clipped to the box `[−bound, bound]^T` when it is unbounded. The clip
/// leaves the coupled set unchanged when `bound` exceeds every action-set radius.
fn constraint_set(a: &ConstraintConfig, t: usize, bound: f64) -> Result<PolytopeSet> {
    let p = matrix(&a.p, t, "A.P")?;
    let b = vector(&a.b, a.p.len(), "A.b")?;
    let q = matrix(&a.q, t, "A.Q")?;
    let e = vector(&a.e, a.q.len(), "A.e")?;
    match PolytopeSet::with_equalities(p.clone(), b.clone(), q.clone(), e.clone()) {
        Err(Error::Unbounded) => {
            let rows = p.nrows();
            let mut pc = Matrix::zeros(rows + 2 * t, t);
            let mut bc = Vector::zeros(rows + 2 * t);
            pc.rows_mut(0, rows).copy_from(&p);
            bc.rows_mut(0, rows).copy_from(&b);
            for k in 0..t {
                pc[(rows + k, k)] = 1.0;
                pc[(rows + t + k, k)] = -1.0;
                bc[rows + k] = bound;
                bc[rows + t + k] = bound;
            }
            PolytopeSet::with_equalities(pc, bc, q, e)
        }
        other => other,
    }
}

impl GameConfig {
    fn into_loaded(self) -> Result<LoadedConfig> {
        let kinds = [self.types.is_some(), self.characteristic.is_some(), self.smartgrid.is_some()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(invalid(
                "exactly one of `types`, `characteristic` or `smartgrid` is required",
            ));
        }
        if let Some(sg) = &self.smartgrid {
            sg.scenario.validate()?;
            return Ok(LoadedConfig {
                scenario: Scenario::SmartGrid {
                    scenario: sg.scenario,
                    types: sg.types,
                },
                reference: self.reference,
            });
        }
        let t = self.dim.ok_or_else(|| invalid("`T` is required"))?;
        if t == 0 {
            return Err(invalid("`T` must be positive"));
        }
        let p = matrix(&self.p, t, "P")?;
        let q = matrix(&self.q, t, "Q")?;
        let c = matrix(self.c.as_deref().ok_or_else(|| invalid("`C` is required"))?, t, "C")?;
        if c.nrows() != t {
            return Err(invalid(format!("C needs {t} rows")));
        }
        let d = match &self.d {
            Some(d) => vector(d, t, "d")?,
            None => Vector::zeros(t),
        };

        let scenario = if let Some(types) = &self.types {
            let mut masses = Vec::new();
            let mut sets = Vec::new();
            let mut costs = Vec::new();
            for (i, ty) in types.iter().enumerate() {
                let b = vector(&ty.b, p.nrows(), &format!("types[{i}].b"))?;
                let e = vector(&ty.e, q.nrows(), &format!("types[{i}].e"))?;
                let s = match &ty.s {
                    Some(s) => matrix(s, t, &format!("types[{i}].S"))?,
                    None => Matrix::zeros(t, t),
                };
                if s.nrows() != t {
                    return Err(invalid(format!("types[{i}].S needs {t} rows")));
                }
                let r = match &ty.r {
                    Some(r) => vector(r, t, &format!("types[{i}].r"))?,
                    None => Vector::zeros(t),
                };
                masses.push(ty.mu);
                sets.push(PolytopeSet::with_equalities(p.clone(), b, q.clone(), e)?);
                costs.push(CostParams::new(c.clone(), d.clone(), s, r)?.into());
            }
            let radius = sets.iter().map(|s: &PolytopeSet| s.radius()).fold(0.0, f64::max);
            let constraint = match &self.a {
                Some(a) => Some(constraint_set(a, t, radius + 1.0)?),
                None => None,
            };
            Scenario::Finite(FiniteTypeGame::new(masses, sets, costs, constraint)?)
        } else {
            let ch = self.characteristic.as_ref().expect("checked above");
            let tc = characteristic(ch, &p, &q, c, d)?;
            let constraint = match &self.a {
                Some(a) => Some(constraint_set(a, t, tc.radius() + 1.0)?),
                None => None,
            };
            let defaults = ApproxOptions::default();
            Scenario::Characteristic {
                tc,
                constraint,
                method: ch.method,
                options: ApproxOptions {
                    endpoint: ch.endpoint.unwrap_or_default(),
                    probes: ch.probes.unwrap_or(defaults.probes),
                    theta_samples: ch.theta_samples.unwrap_or(defaults.theta_samples),
                    cell_cap: ch.cell_cap.unwrap_or(defaults.cell_cap),
                },
            }
        };
        Ok(LoadedConfig {
            scenario,
            reference: self.reference,
        })
    }
}

fn characteristic(
    ch: &CharacteristicConfig,
    p: &Matrix,
    q: &Matrix,
    c: Matrix,
    d: Vector,
) -> Result<TypeCharacteristic> {
    let t = p.ncols();
    let (nb, ne) = (p.nrows(), q.nrows());
    let mut pieces = Vec::with_capacity(ch.pieces.len());
    for (k, pc) in ch.pieces.iter().enumerate() {
        if pc.b.len() != nb || pc.e.len() != ne {
            return Err(invalid(format!(
                "pieces[{k}] needs {nb} entries in b and {ne} in e"
            )));
        }
        if let Some(s) = &pc.s {
            if s.len() != t || s.iter().any(|row| row.len() != t) {
                return Err(invalid(format!("pieces[{k}].S must be {t}x{t}")));
            }
        }
        if pc.r.as_ref().is_some_and(|r| r.len() != t) {
            return Err(invalid(format!("pieces[{k}].r needs {t} entries")));
        }
        let rhs: Vec<Poly> = pc.b.iter().chain(&pc.e).cloned().collect();
        let s = pc.s.clone();
        let r = pc.r.clone();
        pieces.push(CharacteristicPiece {
            start: pc.from,
            end: pc.to,
            rhs: Arc::new(move |th| Vector::from_iterator(rhs.len(), rhs.iter().map(|p| p.eval(th)))),
            utility: Arc::new(move |th| {
                let s = match &s {
                    Some(s) => Matrix::from_fn(t, t, |i, j| s[i][j].eval(th)),
                    None => Matrix::zeros(t, t),
                };
                let r = match &r {
                    Some(r) => Vector::from_iterator(t, r.iter().map(|p| p.eval(th))),
                    None => Vector::zeros(t),
                };
                (s, r)
            }),
        });
    }
    let first = pieces
        .first()
        .ok_or_else(|| invalid("a characteristic needs at least one piece"))?;
    let rhs0 = (first.rhs)(first.start);
    let template = PolytopeSet::with_equalities(
        p.clone(),
        rhs0.rows(0, nb).into_owned(),
        q.clone(),
        rhs0.rows(nb, ne).into_owned(),
    )?;
    let tc = TypeCharacteristic::new(&template, c, d, pieces)?;
    Ok(match ch.radius {
        Some(r) => tc.with_radius(r),
        None => tc,
    })
}
