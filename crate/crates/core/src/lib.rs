//! Numerical workbench for Gaussian measure of convex bodies, vector
//! balancing constants and lattice covering radii.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balancing;
pub mod body;
pub mod bounds;
pub mod cones;
pub mod counterexample;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod planar;
pub mod quad;
pub mod suites;

pub use error::{Error, Result};
