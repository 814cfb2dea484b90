//! Solvers for Hamilton-Jacobi-Bellman equations whose Hamiltonian jumps
//! across the junction point `x = 0`.

// `!(x > 0.0)` rejects NaN as well; that is the intent everywhere it appears.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod config;
pub mod dp;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod pde;
pub mod problem;
pub mod run;
pub mod scalar;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
