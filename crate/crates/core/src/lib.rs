//! Numerical laboratory for multilinear Calderón–Zygmund operators and
//! multilinear fractional integrals acting on weighted Morrey spaces.
//!
//! Everything lives on a truncated uniform lattice over `[-L, L]^n`:
//!
//! - [`lattice`]: lattices, grid functions, balls, ball families and the
//!   midpoint quadrature every measure reduces to.
//! - [`weights`]: power and sampled weights, the Muckenhoupt-type constants
//!   (`A_p`, `A_{p,q}`, multiple `A_P`, `A_{P,q}`) and `A_∞` diagnostics.
//! - [`spaces`]: weighted Lebesgue, weak Lebesgue, Morrey, weak Morrey and
//!   two-weight Morrey norms, each as a supremum over a finite ball family.
//! - [`operators`]: kernels, the truncated m-linear singular integral, the
//!   m-linear fractional integral and dyadic tail majorants.
//! - [`harness`]: lemma checkers, theorem ratio sweeps, reports and the CLI.
//!
//! Suprema over "all balls" are always taken over a [`lattice::BallFamily`],
//! so every reported constant is relative to that family.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod lattice;
pub mod operators;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
