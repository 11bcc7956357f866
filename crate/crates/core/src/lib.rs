//! Numerical toolkit for sup-norm delocalisation bounds of Laplace
//! eigenfunctions on compact hyperbolic surfaces.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod fuchsian;
pub mod geometry;
pub mod multipliers;
pub mod quadrature;
pub mod selberg;
pub mod verify;

pub use error::{Error, Result};
