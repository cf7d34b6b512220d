//! Radial ground states of coupled nonlinear Schrödinger systems.
//!
//! The crate discretizes radial fields on a cell-centered grid, evaluates the
//! constrained energy, minimizes it over products of L² spheres, and checks the
//! structural properties of the coupling numerically.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod energy;
pub mod error;
pub mod grid;
pub mod minimize;
pub mod nonlinearity;
pub mod quadrature;
pub mod symmetrize;

pub use error::{Error, Result};
pub use grid::{FieldVector, RadialGrid};
pub use nonlinearity::{Family, GrowthBound, LowerBound, NonlinearitySpec, StepProfile};
