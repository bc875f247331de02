//! Exact and time-convolutionless (TCL) dynamics of a single bosonic mode
//! coupled to a Lorentzian bath (Fano-Anderson model).
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: time grids, trajectories, frequency quadrature, the
//!   Volterra and RK4 integrators.
//! * [`bath`]: spectral densities, thermal occupation, memory kernel and the
//!   convergence-radius classification.
//! * [`green`]: the exact Green function and its second/fourth-order pieces.
//! * [`coefficients`]: master-equation rates at orders Exact, TCL2, TCL4.
//! * [`dynamics`]: moment propagation and Gaussian states.
//! * [`metrics`]: fidelity, Bures distance, non-Markovianity and sweeps.
//! * [`models`]: the three orders as named, runtime-selectable strategies.
//!
//! Units are natural throughout (ħ = k_B = 1).

pub mod bath;
pub mod coefficients;
pub mod dynamics;
mod error;
pub mod export;
pub mod green;
pub mod metrics;
pub mod models;
pub mod numerics;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
