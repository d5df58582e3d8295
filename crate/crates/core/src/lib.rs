//! Matrix-valued orthogonal polynomials, commuting differential operators and
//! time-and-band limiting at desk scale.

pub mod cli;
pub mod commuting;
pub mod diffop;
pub mod error;
pub mod linalg;
pub mod orthopoly;
pub mod reference;
pub mod weights;

pub use error::{Error, Result};
