//! Counting and asymptotics of lattice walks confined to an orthant.
//!
//! The pipeline runs from a step set ([`model`]) through exact counting
//! ([`enumerate`]), rational diagonal representations ([`diagonal`]) and
//! closed-form predictions ([`asymptotics`]) to numerical verification of
//! those predictions against the counts ([`fitting`]).

pub mod asymptotics;
pub mod corpus;
pub mod diagonal;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod fitting;
pub mod laurent;
pub mod model;

pub use asymptotics::{predict, predict_with_second_order, AsymptoticPrediction, Theorem};
pub use diagonal::{build_rep, diagonal_coeffs, verify_rep, DiagonalRep};
pub use enumerate::{count_walks, ArithmeticMode, CountSequence};
pub use error::{Error, Result};
pub use fitting::{compare, fit_expansion, Tolerances, VerificationReport};
pub use laurent::LaurentPoly;
pub use model::{classify, decompose, ModelClass, WalkModel};
