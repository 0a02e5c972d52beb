//! Sequential Monte-Carlo estimation of the posterior Cramer-Rao lower
//! bound (PCRLB) for discrete-time nonlinear state-space models.
//!
//! The bound `J_t^{-1}` on the mean-square error of any Bayesian state
//! estimator is advanced by a Fisher information recursion whose step
//! matrices are expectations over the joint law of states and measurements.
//! This crate estimates those expectations from measurement sequences alone:
//! an SIR particle filter tracks each sequence, a pairwise construction
//! turns adjacent filtered clouds into joint smoothing samples, and the
//! resulting clouds feed either the additive-Gaussian integrands
//! (`grad_f^T Q^{-1} grad_f`, `grad_g^T R^{-1} grad_g`) or fully general
//! log-density Hessians. A true-state Monte-Carlo reference and a
//! time-averaged squared-error metric support validation, and the harness
//! runs reproducible, seeded experiments with CSV output.

pub mod distributions;
pub mod error;
pub mod harness;
pub mod numkit;
pub mod particle;
pub mod pcrlb;
pub mod smoother;
pub mod ssm;

pub use error::{Error, Result};
