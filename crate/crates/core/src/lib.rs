//! Mirror-image measurement model alongside the standard spectral Born rule.
//!
//! * [`grid`]: 1-D lattice, complex fields, unitary position/momentum transform
//! * [`states`]: Gaussian packets, superpositions, plane-wave phase
//! * [`spectral`]: Hermitian operators, Jacobi eigensolver, Born tables, sampling
//! * [`mirror`]: apparatus image state and the `ψ(p)ψ(-p)` pathway
//! * [`analogy`]: classical two-ball coincidence Monte Carlo
//! * [`cli`] and [`suite`]: config parsing, experiment runner, acceptance battery

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analogy;
pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod mirror;
pub mod rng;
pub mod spectral;
pub mod states;
pub mod suite;

pub use error::{Error, Result};
