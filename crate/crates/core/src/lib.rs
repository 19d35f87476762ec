//! Landweber-Kaczmarz iterative regularization with inexact inner solvers.
//!
//! The crate is organized bottom-up: [`grid`] and [`penalty`] provide the
//! convex-analysis substrate, [`pdhg`] and [`inner`] the inexact minimizer of
//! `Θ(z) − ⟨ξ, z⟩`, [`engine`] the outer iterations, [`ct`] and [`pde`] two
//! forward problems, and [`harness`] the experiment driver behind the CLI.

pub mod ct;
pub mod engine;
pub mod error;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod inner;
pub mod noise;
pub mod pde;
pub mod pdhg;
pub mod penalty;
pub mod sparse;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use grid::Grid;
pub use penalty::{Constraint, Penalty, PenaltyKind, PrimalDualPair};
