//! Chiral light-matter interaction in whispering-gallery-mode resonators.
//!
//! The crate covers the full chain from the resonator mode structure to device figures of merit:
//!
//! * [`specfun`]: integer-order Bessel functions and Wigner 3j/6j symbols.
//! * [`wgm`]: cylindrical WGM resonances, local polarization and counter-propagating overlap.
//! * [`atom`]: hyperfine level schemes, dipole strengths, lowering operators and Zeeman shifts.
//! * [`lindblad`]: atom coupled to two counter-propagating modes, steady state of the master
//!   equation and input-output spectra.
//! * [`chiral`]: closed-form steady states and the directional beta-factor calculus.
//! * [`devices`]: optical diode, four-port circulator and single-photon Raman switch.
//!
//! Rates are field (amplitude) rates in rad/s unless stated otherwise.

pub mod atom;
pub mod chiral;
pub mod devices;
pub mod error;
pub mod export;
pub mod lindblad;
pub mod polarization;
pub mod sparse;
pub mod specfun;
pub mod units;
pub mod validation;
pub mod wgm;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Library version, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
