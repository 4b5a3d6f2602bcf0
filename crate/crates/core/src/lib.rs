//! Simulation and alignment toolkit for line-of-sight OAM links between
//! uniform circular arrays.
//!
//! The crate is split along the processing chain:
//!
//! * [`geometry`] builds the arrays and converts receiver rotations into the
//!   elevation/azimuth misalignment angles.
//! * [`channel`] produces received samples, either by exact point-source
//!   summation or with the closed-form far-field Bessel model.
//! * [`estimator`] recovers the misalignment angles from cross-modal phases.
//! * [`correction`] builds the receive phase mask, decodes modes and scores
//!   inter-modal interference (SIR, capacity).
//! * [`harness`] runs seeded Monte Carlo experiments and writes result files.

pub mod bessel;
pub mod channel;
pub mod correction;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod harness;
pub mod phase;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavenumber 2πf/c for a frequency in Hz.
pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT
}
