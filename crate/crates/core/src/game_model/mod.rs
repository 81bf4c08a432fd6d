//! Continuum characteristics, finite-type games and the quadratic
//! public-products cost family.

mod characteristic;
mod cost;
mod game;
mod monotonicity;
mod polytope;

pub use characteristic::{CharacteristicPiece, RhsMap, TypeCharacteristic, UtilityMap};
pub use cost::{CostParams, GradientOracle, TypeCost};
pub use game::FiniteTypeGame;
pub use monotonicity::{characteristic_certificate, monotonicity_certificate, MonotonicityCertificate, MonotonicityClass};
pub use polytope::PolytopeSet;

