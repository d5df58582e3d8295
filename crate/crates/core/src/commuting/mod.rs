//! The commuting operator `T`, its matrix `L`, the commutation checks and the
//! commutant searches.

pub mod commutant;
pub mod hyp;
pub mod setup;

pub use hyp::{solve_hyp, HypSolution};
pub use setup::{build_l, build_t, BlockTridiagonal, CommutationReport, KernelCheck, TimeBandSetup};
