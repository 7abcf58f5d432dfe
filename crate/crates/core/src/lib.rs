//! Axial periodic orbits of a massless body moving on the symmetry axis of a
//! rigidly rotating ring of `N` unit masses.
//!
//! The crate is organised around the variational picture of the problem:
//!
//! * [`geometry`] builds the regular N-gon relative equilibrium and its radius.
//! * [`loopspace`] represents periodic axial loops as truncated trigonometric
//!   series restricted to one of two symmetry classes.
//! * [`action`] evaluates the Lagrangian action, its gradient and Hessian in
//!   coefficient space, and minimizes it.
//! * [`optimize`] holds the interchangeable unconstrained minimizers used by
//!   [`action::minimize`], registered by name.
//! * [`jacobi`] performs the second-variation analysis at the planar loop.
//! * [`dynamics`] integrates the axial equation of motion and checks
//!   minimizers against it.
//! * [`io`] defines the JSON and CSV wire formats.

pub mod action;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod jacobi;
pub mod loopspace;
pub mod optimize;
pub mod summation;

pub use error::{Error, Result};
pub use geometry::CircularConfig;
pub use loopspace::{LoopPath, SymmetryClass};
