//! Two-dimensional one-component plasma at inverse temperature two with pinned charge
//! clusters.
//!
//! The crate evaluates the exact determinantal partition functions of the Ginibre
//! ensemble conditioned on pinned unit charges, the closed-form mean-field energies of
//! the punctured droplet, and the asymptotic free-energy expansions they are compared to.
//! Independent Monte Carlo and quadrature oracles live in [`oracle`]; [`experiment`] runs
//! the convergence sweeps over the scale grid.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod configuration;
pub mod error;
pub mod experiment;
pub mod freeenergy;
pub mod kernel;
pub mod meanfield;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
pub use num_complex::Complex64;
