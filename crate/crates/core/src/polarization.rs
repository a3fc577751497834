//! Overlaps of mode polarizations with the atomic eigenpolarizations σ+, π, σ-.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Complex overlaps of one local field with e_σ+ = (e_r + i e_φ)/√2, e_π = e_z and
/// e_σ- = (e_r - i e_φ)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationOverlaps {
    pub sigma_plus: C64,
    pub pi: C64,
    pub sigma_minus: C64,
}

impl PolarizationOverlaps {
    pub fn new(sigma_plus: C64, pi: C64, sigma_minus: C64) -> Self {
        PolarizationOverlaps { sigma_plus, pi, sigma_minus }
    }

    /// Transverse polarization with |α_σ+|² = x and real, non-negative amplitudes.
    pub fn transverse(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("|alpha_sigma+|^2 = {x} outside [0, 1]")));
        }
        Ok(PolarizationOverlaps::new(C64::new(x.sqrt(), 0.0), C64::new(0.0, 0.0), C64::new((1.0 - x).sqrt(), 0.0)))
    }

    /// Pure π polarization.
    pub fn pi_only() -> Self {
        PolarizationOverlaps::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Component coupling to Δm_F = q (q = +1 → σ+, 0 → π, -1 → σ-).
    pub fn component(&self, q: i32) -> C64 {
        match q {
            1 => self.sigma_plus,
            0 => self.pi,
            -1 => self.sigma_minus,
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sigma_plus.norm_sqr() + self.pi.norm_sqr() + self.sigma_minus.norm_sqr()
    }

    /// Overlaps of the time-reversed (complex-conjugated) field.
    pub fn time_reversed(&self) -> Self {
        PolarizationOverlaps::new(self.sigma_minus.conj(), self.pi.conj(), self.sigma_plus.conj())
    }

    /// Σ_i self_i · conj(other_i).
    pub fn inner(&self, other: &PolarizationOverlaps) -> C64 {
        self.sigma_plus * other.sigma_plus.conj() + self.pi * other.pi.conj() + self.sigma_minus * other.sigma_minus.conj()
    }

    /// Projection onto a real-axis linear dipole with spherical components c_q.
    pub fn project(&self, c: &[C64; 3]) -> C64 {
        self.sigma_minus * c[0] + self.pi * c[1] + self.sigma_plus * c[2]
    }
}

/// Overlaps of the counter-clockwise mode a (α) and the clockwise mode b (β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeOverlaps {
    pub alpha: PolarizationOverlaps,
    pub beta: PolarizationOverlaps,
}

impl ModeOverlaps {
    /// β follows from α by time reversal.
    pub fn from_alpha(alpha: PolarizationOverlaps) -> Self {
        ModeOverlaps { alpha, beta: alpha.time_reversed() }
    }

    /// Transverse counter-propagating pair with |α_σ+|² = x.
    pub fn transverse(x: f64) -> Result<Self> {
        Ok(Self::from_alpha(PolarizationOverlaps::transverse(x)?))
    }

    /// Roles of the two modes exchanged (probing from the other port).
    pub fn swapped(&self) -> Self {
        ModeOverlaps { alpha: self.beta, beta: self.alpha }
    }

    /// |Σ_i α_i β_i*|².
    pub fn counter_propagating_overlap(&self) -> f64 {
        self.alpha.inner(&self.beta).norm_sqr()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        for (name, o) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            let n = o.norm_sqr();
            if (n - 1.0).abs() > tol {
                return Err(Error::Domain(format!("{name} overlaps have norm {n}, expected 1")));
            }
        }
        Ok(())
    }
}
