//! Unit conversions.

use std::f64::consts::PI;

/// Bohr magneton over the reduced Planck constant, rad s^-1 T^-1 (CODATA 2018).
pub const MU_B_OVER_HBAR: f64 = 9.274_010_078_3e-24 / 1.054_571_817e-34;

/// Converts an ordinary frequency in MHz to an angular rate in rad/s.
pub fn mhz_to_rad(f_mhz: f64) -> f64 {
    2.0 * PI * 1e6 * f_mhz
}

/// Converts an angular rate in rad/s to an ordinary frequency in MHz.
pub fn rad_to_mhz(w: f64) -> f64 {
    w / (2.0 * PI * 1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        assert!((rad_to_mhz(mhz_to_rad(3.0)) - 3.0).abs() < 1e-15);
        assert!((mhz_to_rad(1.0) - 6.283_185_307_179_586e6).abs() < 1e-6);
    }

    #[test]
    fn bohr_magneton() {
        // 1.399 624 MHz/G.
        let per_gauss_mhz = rad_to_mhz(MU_B_OVER_HBAR * 1e-4);
        assert!((per_gauss_mhz - 1.399_624_493).abs() < 1e-8);
    }
}
