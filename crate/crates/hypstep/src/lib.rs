//! Exactly solvable quantum scattering off the hyperbolic step potential
//! V(x) = (V0/2)(1 + tanh(x/2a)), in units hbar^2/(2m) = 1.
//!
//! The crate provides the closed-form transfer and scattering matrices,
//! reflection/transmission amplitudes, the anti-bound pole ladder on the
//! negative imaginary momentum axis, the Darboux (SUSY) partner hierarchy of
//! Rosen-Morse II potentials built from anti-bound seeds, and Wigner and
//! classical time delays. Every closed-form quantity is cross-validated by an
//! independent numerical ODE oracle (`oracle`).

pub mod delay;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scattering;
pub mod specfun;
pub mod susy;
pub mod verify;

pub use error::{Error, Result};
pub use model::PotentialParams;
