//! Biharmonic Dirichlet problem on the unit ball of ℝⁿ.
//!
//! The solution of `Δ²f = g` with trace `φ₁` and inward normal derivative
//! `φ₂` is evaluated through its kernel representation
//! `f = K[φ₁] + H[φ₂] + G[g]`, with quadrature rules built for the axially
//! symmetric structure of the kernels. Bounds of Heinz–Schwarz type and
//! explicit gradient bounds are computed alongside.

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod lipschitz;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::Point;
