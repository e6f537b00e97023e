//! Sub-linear bi-criteria solvers for geometric optimization with outliers.
//!
//! The crate provides core-set MEB, MEB with outliers (linear and
//! sub-linear), the generic minimum-enclosing-shape framework with its
//! k-center, slab (flat fitting), and halfspace (SVM) instantiations,
//! planted-instance generators, and the reference oracles used to validate
//! all of them.

pub mod error;
pub mod geometry;
pub mod meb;
pub mod oracles;

pub use error::{Error, Result};
pub use geometry::{CounterSnapshot, EvalCounter, Point, PointSet, RngStream};
pub use meb::{ApproxParams, Ball};
