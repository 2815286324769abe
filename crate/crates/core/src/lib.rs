//! Numerical laboratory for Almgren-type frequency functions.
//!
//! The crate evaluates exact and grid-backed scalar fields, integrates over
//! spheres and balls, computes the classical, drift and `p`-power frequency
//! functions on radius sweeps, and checks the identities and inequalities
//! that drive unique-continuation arguments (Rellich–Nečas, Harnack-type
//! bounds for the boundary mass, doubling, vanishing order). A small
//! finite-difference solver produces non-closed-form solutions of the
//! Laplace, constant-drift and `p`-Laplace Dirichlet problems on squares.
//!
//! Everything here is `no_std` + `alloc`; IO, configuration and parallel
//! sweeps live in the `freqlab` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod math;
mod point;

pub mod catalog;
pub mod fields;
pub mod frequency;
pub mod poly;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{eval_bundle, make_field, pde_residual, Bundle, Equation, Field, FieldSpec, ScalarField};
pub use point::{Dim, Point};
