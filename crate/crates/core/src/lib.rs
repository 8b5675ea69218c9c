//! Thin elastic sheet floating on a liquid and lifted at one end.
//!
//! The crate evaluates the finite-thickness energy and its Γ-limit on
//! discretized curves, solves the limit problem semi-analytically, minimizes
//! the finite-thickness energy directly and runs the recovery-sequence
//! construction that links the two.

pub mod cli;
pub mod curve;
pub mod energy;
pub mod error;
pub mod gamma;
pub mod laplace_young;
pub mod model;
pub mod ode;
pub mod solver;

pub use error::{Error, Result};
