//! Simulation and optimization of dynamical photon blockade in a single
//! weakly nonlinear (Kerr) bosonic mode driven only by a train of pulses.
//!
//! The pieces, bottom-up:
//!
//! - [`pulse`]: Gaussian and trapezoidal ("rectangular") pulse trains and
//!   their Fourier series.
//! - [`fock`]: truncated Fock-space operators, the master equation, its
//!   time integration from the vacuum, and photon statistics (n, g², P_k).
//! - [`analytic`]: the weak-excitation two-photon-manifold solution used as
//!   an independent check of the master-equation results.
//! - [`pso`]: a seeded, deterministic particle swarm optimizer.
//! - [`fitness`]: the blockade objective (minimum g² in the periodic
//!   regime) and one-parameter sweeps.
//! - [`run`]: configuration files and the four run commands that write CSV,
//!   JSON and optional SVG artifacts.

// Negated comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod fitness;
pub mod fock;
pub mod integrator;
pub mod pso;
pub mod pulse;
pub mod quadrature;
pub mod run;

pub use error::{Error, Result};
