//! Matrix-free spectral toolkit for the supersymmetric x²y² matrix
//! Schrödinger operator
//!
//! ```text
//! H = p_x² + p_y² + x²y² + xσ₃ + yσ₁     on L²(ℝ²) ⊗ ℂ²,
//! ```
//!
//! the square of the supercharge Q = p_xσ₃ − p_yσ₁ − xyσ₂. The library
//! discretizes H, Q and their symmetry operators on reflection-exact
//! finite-difference grids, computes low-lying spectra matrix-free, and
//! verifies — with explicit defects and tolerances — the operator
//! identities, lower bounds and delocalization diagnostics that underlie
//! the statement that H has no normalizable zero-energy state even though
//! its spectrum reaches down to zero.
//!
//! The crate is organized around small, composable pieces:
//!
//! * [`grid`] — symmetric cell-centered boxes, 1D difference stencils,
//!   diagonal multiplication operators, region restrictions;
//! * [`cutoff`] — the Huber ramp family h, h', g, h_ε and friends;
//! * [`field`] — two-component complex grid functions;
//! * [`operator`] — matrix-free H, Q, reflections, comparison operators;
//! * [`eigen`] — Lanczos iteration with residual certificates plus a
//!   dense oracle for small problems;
//! * [`verify`] — the orchestrated checks, each returning a
//!   [`verify::VerificationReport`] with a measured defect and tolerance.

pub mod cutoff;
pub mod eigen;
pub mod field;
pub mod grid;
pub mod operator;
pub mod verify;

#[cfg(doctest)]
mod book;
