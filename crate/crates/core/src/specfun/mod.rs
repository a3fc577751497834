//! Special functions: integer-order Bessel functions of real argument and Wigner 3j/6j symbols.

mod bessel;
mod wigner;

pub use bessel::{bessel_j, bessel_j_with_derivative, bessel_jy, bessel_y_log, BesselPair, YLog, MAX_ORDER};
pub use wigner::{wigner_3j, wigner_6j, HalfInt, WignerKind, WignerSymbol};
