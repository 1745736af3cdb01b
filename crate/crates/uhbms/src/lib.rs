//! Dual action of SL(2,R)×SL(2,R) on functions over the torus, its infinite
//! little groups `H(N, q0, p0)`, their invariant functions and fundamental
//! regions, and desk-scale induced representation operators.

pub mod error;
pub mod exec;
pub mod group_core;
pub mod induced_reps;
pub mod invariant_functions;
pub mod little_groups;
pub mod torus_action;

pub use error::{Error, Result};
pub use exec::Exec;
