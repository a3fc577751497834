//! Atom coupled to two counter-propagating resonator modes a (CCW) and b (CW), each coupled to a
//! waveguide: Hamiltonian, Lindblad dissipators, steady state and input-output relations.
//!
//! Lindblad terms use D[c]ρ = 2cρc† − c†cρ − ρc†c with coefficients κ_0 + κ_ext for each mode
//! and γ for each atomic decay channel, so all rates are field (amplitude) decay rates.

mod solver;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::atom::AtomOperators;
use crate::error::{Error, Result};
use crate::polarization::ModeOverlaps;
use crate::sparse::SparseMatrix;
use crate::units::MU_B_OVER_HBAR;
use crate::C64;

pub use solver::{steady_state, SolveDiagnostics, SolveMethod, SolverOptions, SteadyState, TRUNCATION_THRESHOLD};
pub use spectrum::{
    default_detuning_grid, drive_linearity, probe, spectrum, ProbeDirection, ProbeOptions, ProbeResult, SpectrumPoint, SpectrumResult,
};

/// Rates (rad/s), detunings (rad/s), magnetic field (T) and mode overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub g: f64,
    pub gamma: f64,
    pub kappa_0: f64,
    pub kappa_ext: f64,
    pub h: f64,
    pub delta_ap: f64,
    pub delta_rp: f64,
    pub b_field: f64,
    pub overlaps: ModeOverlaps,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.gamma, self.kappa_0, self.kappa_ext, self.h, self.delta_ap, self.delta_rp, self.b_field]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("system parameters must be finite".into()));
        }
        if self.gamma < 0.0 || self.kappa_0 < 0.0 || self.kappa_ext < 0.0 {
            return Err(Error::Domain("decay rates must be non-negative".into()));
        }
        self.overlaps.check_normalized(1e-9)
    }

    /// Total field decay rate of each mode.
    pub fn kappa(&self) -> f64 {
        self.kappa_0 + self.kappa_ext
    }
}

/// Waveguide input amplitudes (√(photons/s)) for the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub s_in_a: C64,
    pub s_in_b: C64,
}

impl DriveSpec {
    /// Pump rates ε = i√(2κ_ext)·s_in entering H as i(ε* a − ε a†) = √(2κ_ext)(s_in a† + s_in* a).
    pub fn pump_rates(&self, kappa_ext: f64) -> (C64, C64) {
        let c = C64::new(0.0, (2.0 * kappa_ext).sqrt());
        (c * self.s_in_a, c * self.s_in_b)
    }
}

/// Composite basis |atom⟩ ⊗ |n_a, n_b⟩ with n_a + n_b ≤ N_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLayout {
    pub atom_dim: usize,
    pub n_max: usize,
    pub fock: Vec<(usize, usize)>,
}

impl HilbertLayout {
    pub fn new(atom_dim: usize, n_max: usize) -> Self {
        let mut fock = Vec::new();
        for total in 0..=n_max {
            for na in (0..=total).rev() {
                fock.push((na, total - na));
            }
        }
        HilbertLayout { atom_dim, n_max, fock }
    }

    pub fn n_fock(&self) -> usize {
        self.fock.len()
    }

    pub fn dim(&self) -> usize {
        self.atom_dim * self.fock.len()
    }

    pub fn index(&self, atom: usize, fock: usize) -> usize {
        atom * self.fock.len() + fock
    }

    pub fn fock_index(&self, na: usize, nb: usize) -> Option<usize> {
        self.fock.iter().position(|&f| f == (na, nb))
    }

    fn mode_fock(&self, which: usize) -> SparseMatrix {
        let n = self.n_fock();
        let triplets = self.fock.iter().enumerate().filter_map(|(k, &(na, nb))| {
            let (count, lowered) = if which == 0 { (na, (na.wrapping_sub(1), nb)) } else { (nb, (na, nb.wrapping_sub(1))) };
            if count == 0 {
                return None;
            }
            let target = self.fock_index(lowered.0, lowered.1)?;
            Some((target, k, C64::new((count as f64).sqrt(), 0.0)))
        });
        SparseMatrix::from_triplets(n, n, triplets)
    }

    /// Annihilation operator of mode a on the composite space.
    pub fn mode_a(&self) -> SparseMatrix {
        SparseMatrix::identity(self.atom_dim).kron(&self.mode_fock(0))
    }

    /// Annihilation operator of mode b on the composite space.
    pub fn mode_b(&self) -> SparseMatrix {
        SparseMatrix::identity(self.atom_dim).kron(&self.mode_fock(1))
    }

    pub fn embed_atom(&self, op: &SparseMatrix) -> Result<SparseMatrix> {
        if op.rows() != self.atom_dim || op.cols() != self.atom_dim {
            return Err(Error::DimensionMismatch(format!(
                "atomic operator is {}x{}, layout expects {}",
                op.rows(),
                op.cols(),
                self.atom_dim
            )));
        }
        Ok(op.kron(&SparseMatrix::identity(self.n_fock())))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Full Hamiltonian (units of ħ, rad/s):
/// Zeeman + Δ_AP on excited states + Δ_RP(a†a + b†b) + g(a d_a† + a† d_a) + g(b d_b† + b† d_b)
/// + h(a† + b†)(a + b) + i(ε_a* a − ε_a a†) + i(ε_b* b − ε_b b†).
pub fn build_hamiltonian(atom: &AtomOperators, params: &SystemParams, drive: &DriveSpec, layout: &HilbertLayout) -> Result<SparseMatrix> {
    if atom.dim != layout.atom_dim || atom.excited.len() != atom.dim || atom.zeeman_coefficients.len() != atom.dim {
        return Err(Error::DimensionMismatch(format!("atom of dimension {} in a layout for {}", atom.dim, layout.atom_dim)));
    }
    let n = layout.dim();
    let mut diag = Vec::new();
    for s in 0..atom.dim {
        let mut e = MU_B_OVER_HBAR * atom.zeeman_coefficients[s] * params.b_field;
        if atom.excited[s] {
            e += params.delta_ap;
        }
        for (f, &(na, nb)) in layout.fock.iter().enumerate() {
            diag.push((layout.index(s, f), layout.index(s, f), real(e + params.delta_rp * (na + nb) as f64)));
        }
    }
    let mut h = SparseMatrix::from_triplets(n, n, diag);

    let a = layout.mode_a();
    let b = layout.mode_b();
    let d_a = layout.embed_atom(&atom.mode_lowering(&params.overlaps.alpha))?;
    let d_b = layout.embed_atom(&atom.mode_lowering(&params.overlaps.beta))?;
    for (mode, d) in [(&a, &d_a), (&b, &d_b)] {
        let term = mode.mul(&d.adjoint())?;
        h = h.add(&term.add(&term.adjoint())?.scale(real(params.g)))?;
    }
    if params.h != 0.0 {
        let sum = a.add(&b)?;
        h = h.add(&sum.adjoint().mul(&sum)?.scale(real(params.h)))?;
    }
    let (eps_a, eps_b) = drive.pump_rates(params.kappa_ext);
    let i = C64::new(0.0, 1.0);
    for (mode, eps) in [(&a, eps_a), (&b, eps_b)] {
        if eps != C64::new(0.0, 0.0) {
            let term = mode.scale(i * eps.conj()).sub(&mode.adjoint().scale(i * eps))?;
            h = h.add(&term)?;
        }
    }
    Ok(h)
}

/// Jump operators L with standard form LρL† − ½{L†L, ρ}: √(2κ) a, √(2κ) b with κ = κ_0 + κ_ext,
/// and √(2γ)·μ |g⟩⟨e| for every allowed (m_F, m_F') pair.
pub fn collapse_operators(atom: &AtomOperators, params: &SystemParams, layout: &HilbertLayout) -> Result<Vec<SparseMatrix>> {
    let mut ops = Vec::new();
    let kappa = params.kappa();
    if kappa > 0.0 {
        ops.push(layout.mode_a().scale(real((2.0 * kappa).sqrt())));
        ops.push(layout.mode_b().scale(real((2.0 * kappa).sqrt())));
    }
    if params.gamma > 0.0 {
        for ch in &atom.decay {
            let jump = SparseMatrix::from_triplets(atom.dim, atom.dim, [(ch.ground, ch.excited, real(ch.weight))]);
            ops.push(layout.embed_atom(&jump)?.scale(real((2.0 * params.gamma).sqrt())));
        }
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::AtomOperators;

    fn params(g: f64, overlaps: ModeOverlaps) -> SystemParams {
        SystemParams { g, gamma: 1.0, kappa_0: 1.0, kappa_ext: 1.0, h: 0.0, delta_ap: 0.0, delta_rp: 0.0, b_field: 0.0, overlaps }
    }

    #[test]
    fn layout_counts() {
        let l = HilbertLayout::new(4, 2);
        assert_eq!(l.n_fock(), 6);
        assert_eq!(l.dim(), 24);
        let a = l.mode_a();
        let n_a = a.adjoint().mul(&a).unwrap();
        let k = l.index(0, l.fock_index(2, 0).unwrap());
        assert!((n_a.get(k, k).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let atom = AtomOperators::v_system(1.0);
        let mut p = params(3.0, ModeOverlaps::transverse(0.8).unwrap());
        p.h = 0.4;
        p.delta_ap = 0.3;
        let drive = DriveSpec { s_in_a: C64::new(0.01, 0.002), s_in_b: C64::new(0.0, 0.0) };
        let h = build_hamiltonian(&atom, &p, &drive, &HilbertLayout::new(4, 2)).unwrap();
        assert!(h.hermiticity_error() < 1e-15);
    }

    #[test]
    fn uncoupled_hamiltonian_is_block_diagonal() {
        let atom = AtomOperators::v_system(1.0);
        let p = params(0.0, ModeOverlaps::transverse(1.0).unwrap());
        let drive = DriveSpec { s_in_a: C64::new(0.01, 0.0), s_in_b: C64::new(0.0, 0.0) };
        let layout = HilbertLayout::new(4, 2);
        let h = build_hamiltonian(&atom, &p, &drive, &layout).unwrap();
        for (r, c, _) in h.triplets() {
            assert_eq!(r / layout.n_fock(), c / layout.n_fock(), "atom index changed by ({r}, {c})");
        }
    }

    #[test]
    fn circular_modes_select_transitions() {
        let atom = AtomOperators::v_system(1.0);
        let o = ModeOverlaps::transverse(1.0).unwrap();
        let da = atom.mode_lowering(&o.alpha);
        let db = atom.mode_lowering(&o.beta);
        // Ground is index 0, excited m' = -1, 0, +1 are 1, 2, 3.
        assert_eq!(da.nnz(), 1);
        assert!((da.get(0, 3).re - 1.0).abs() < 1e-15);
        assert_eq!(db.nnz(), 1);
        assert!((db.get(0, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let atom = AtomOperators::v_system(1.0);
        let p = params(1.0, ModeOverlaps::transverse(1.0).unwrap());
        let drive = DriveSpec { s_in_a: C64::new(0.0, 0.0), s_in_b: C64::new(0.0, 0.0) };
        assert!(matches!(build_hamiltonian(&atom, &p, &drive, &HilbertLayout::new(2, 2)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn collapse_set() {
        let atom = AtomOperators::v_system(1.0);
        let p = params(1.0, ModeOverlaps::transverse(1.0).unwrap());
        let ops = collapse_operators(&atom, &p, &HilbertLayout::new(4, 2)).unwrap();
        assert_eq!(ops.len(), 2 + 3);
    }
}
