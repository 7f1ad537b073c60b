//! Nevanlinna-Pick interpolation on the symmetrized bidisc
//! `G = {(z + w, z w) : |z| < 1, |w| < 1}`.
//!
//! The pipeline decides whether finitely many interpolation conditions
//! `phi(s_j) = w_j` admit an analytic `phi: G -> closed unit disc`, and if
//! so constructs one explicitly as a transfer function
//! `phi(s) = A + <s_T (1 - D s_T)^{-1} gamma, beta>` with
//! `s_T = (2 s2 T - s1)(2 - s1 T)^{-1}`:
//!
//! 1. [`pick`] lifts the problem to the bidisc and solves the bidisc Pick
//!    criterion as a semidefinite feasibility problem;
//! 2. [`modelbuild`] symmetrizes the resulting bidisc model into a G-model
//!    with a unitary operator;
//! 3. [`realize`] turns the G-model into a contractive colligation.
//!
//! [`spectral`] holds the spectral-domain experiments and [`geometry`] the
//! function theory of G itself.

// `!(x <= bound)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
mod lurking;
pub mod modelbuild;
pub mod numerics;
pub mod pick;
pub mod realize;
pub mod sampling;
pub mod spectral;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use geometry::{BidiscPoint, Fiber, GPoint, Membership, Region};
pub use numerics::{CMatrix, HermitianMatrix, C64};
