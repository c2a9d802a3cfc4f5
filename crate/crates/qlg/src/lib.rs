//! Quantum lattice gas model of Dirac particles in 1+1 dimensions.
//!
//! The crate provides several mutually validating routes to the same
//! physics:
//!
//! * [`evolution`] — the split collide/stream unitary stepper for a
//!   2-spinor field on a periodic lattice, observables, the grid-level
//!   dispersion relation, and a classical lattice Boltzmann comparator;
//! * [`kernel`] — the checkerboard path-summation propagator, both by
//!   exact enumeration over spin histories and by an N-fold
//!   transfer-matrix product;
//! * [`models`] — closed-form square-well and harmonic-oscillator
//!   references used to validate the stepper;
//! * [`gates`] and [`engine`] — the qubit algebra (ladder operators,
//!   conservative two-qubit gates, the chiral collide gate) and a dense
//!   state-vector engine that runs the same dynamics as a many-body
//!   circuit;
//! * [`experiments`] — reproducible assemblies of the validation runs,
//!   shared by the acceptance suite and the CLI;
//! * [`snapshot`] — the byte-exact state-vector file format.
//!
//! Everything is in natural units with the grid scales `ell` and `tau`
//! carried explicitly; the default lattice has `ell = tau = 1`.

pub mod engine;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod gates;
pub mod kernel;
pub mod models;
pub mod numerics;
pub mod snapshot;

pub use error::{Error, Result};
pub use numerics::{Mat2, Mat4, Spinor2, SpinorField, C64};
