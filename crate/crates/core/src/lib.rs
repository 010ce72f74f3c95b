//! Numerical verification toolkit for `Laplacian u - k u_x - lambda u = 0` on the
//! strip `R x (0, pi)`.
//!
//! The crate is generic over the scalar type through [`Real`]; `f64` aliases
//! are provided at the root for the common case.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod barrier;
pub mod conformal;
pub mod duality;
mod error;
pub mod fd;
pub mod field;
pub mod grid;
pub mod maglev;
pub mod params;
pub mod quadrature;
mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use field::{PatchField, ScalarField, VectorField};
pub use grid::{HalfPlaneGrid, StripGrid};
pub use params::{MaglevParams, PdeParams};
pub use scalar::Real;

pub type StripGrid64 = StripGrid<f64>;
pub type HalfPlaneGrid64 = HalfPlaneGrid<f64>;
pub type ScalarField64 = ScalarField<f64>;
pub type VectorField64 = VectorField<f64>;
pub type PdeParams64 = PdeParams<f64>;
pub type MaglevParams64 = MaglevParams<f64>;
