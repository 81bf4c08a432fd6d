//! Finite-type approximation of variational Wardrop equilibria in nonatomic
//! aggregative games with polytopic action sets.

pub mod error;
pub mod analysis;
pub mod approximation;
pub mod game_model;
pub mod linalg;
mod lp;
pub mod scenarios;
pub mod vi_solver;

pub use error::{Error, Result};
