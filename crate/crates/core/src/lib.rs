//! Dominant-eigenpair solvers for sparse symmetric matrices.
//!
//! The crate pairs two families of iterations that both rest on Chebyshev
//! polynomial filtering:
//!
//! - heavy-ball (momentum) accelerated power iterations, with a static
//!   momentum parameter or one estimated on the fly from residual ratios;
//! - restarted Lanczos(m), plain or with a power/momentum inner stage between
//!   restarts.
//!
//! [`rates`] predicts the asymptotic rate of each family from a few spectral
//! gaps and locates the Krylov dimension at which the two cross. [`analysis`]
//! fits per-eigenmode decay slopes from recorded runs on diagonal operators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod market;
pub mod matrix;
pub mod rates;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
pub use matrix::{make_diag_descending, make_diag_indefinite, SparseMatrix};
pub use rates::SpectrumGaps;
pub use solvers::{Method, ResidualMode, SolveOutcome, SolverConfig, Status};
