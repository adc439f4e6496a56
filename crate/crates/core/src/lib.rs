//! Simulation of an opto-magneto-mechanical quantum interface.
//!
//! A superconducting flux qubit couples through a magnetostrictive collar to
//! the bulk-acoustic-wave mode of a Fabry-Perot mirror, which in turn couples
//! to the optical cavity field by radiation pressure. Two such nodes joined by
//! a fibre form a cascaded network that transfers a qubit excitation from one
//! node to the other.
//!
//! Module map:
//! - [`quantum`]: tensor-product operators, states and measurements.
//! - [`node`]: single-node parameters, steady state and Hamiltonians.
//! - [`network`]: cascaded master-equation generator and integrators.
//! - [`device`]: physical mirror geometry to model rates.
//! - [`scenario`]: configuration-driven experiment runner and file output.
//!
//! All dynamical rates are expressed in units of the total cavity decay
//! rate κ; time is in units of 1/κ.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod device;
pub mod error;
pub mod network;
pub mod node;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
