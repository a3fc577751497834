use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{steady_state, SolverOptions, SteadyState};
use super::{build_hamiltonian, collapse_operators, DriveSpec, HilbertLayout, SystemParams};
use crate::atom::AtomOperators;
use crate::error::Result;
use crate::C64;

/// Which waveguide port is pumped: forward drives mode a, backward drives mode b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeDirection {
    Forward,
    Backward,
}

/// Truncation, drive strength and linear-solver settings of a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOptions {
    /// Total photon cutoff n_a + n_b ≤ n_max.
    pub n_max: usize,
    /// Input amplitude in units of √κ_0. Saturation corrections scale as drive², about 5e-7 relative at 1e-3.
    pub drive: f64,
    pub solver: SolverOptions,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { n_max: 2, drive: 1e-3, solver: SolverOptions::default() }
    }
}

impl ProbeOptions {
    /// Input amplitude s_in in √(1/s); falls back to √κ_ext when κ_0 = 0.
    pub fn input_amplitude(&self, params: &SystemParams) -> f64 {
        let scale = if params.kappa_0 > 0.0 { params.kappa_0 } else { params.kappa_ext.max(1.0) };
        self.drive * scale.sqrt()
    }
}

/// Steady state under a one-sided probe together with the waveguide amplitudes
/// t = 1 − i√(2κ_ext)⟨c_pumped⟩/s_in and r = −i√(2κ_ext)⟨c_other⟩/s_in.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub state: SteadyState,
    pub direction: ProbeDirection,
    pub s_in: f64,
    pub t: C64,
    pub r: C64,
}

pub fn probe(atom: &AtomOperators, params: &SystemParams, direction: ProbeDirection, options: &ProbeOptions) -> Result<ProbeResult> {
    probe_with_amplitude(atom, params, direction, options, options.input_amplitude(params))
}

fn probe_with_amplitude(atom: &AtomOperators, params: &SystemParams, direction: ProbeDirection, options: &ProbeOptions, s: f64) -> Result<ProbeResult> {
    params.validate()?;
    let layout = HilbertLayout::new(atom.dim, options.n_max);
    let zero = C64::new(0.0, 0.0);
    let s_c = C64::new(s, 0.0);
    let drive = match direction {
        ProbeDirection::Forward => DriveSpec { s_in_a: s_c, s_in_b: zero },
        ProbeDirection::Backward => DriveSpec { s_in_a: zero, s_in_b: s_c },
    };
    let h = build_hamiltonian(atom, params, &drive, &layout)?;
    let collapse = collapse_operators(atom, params, &layout)?;
    let state = steady_state(&h, &collapse, &layout, &options.solver)?;
    let (pumped, other) = match direction {
        ProbeDirection::Forward => (state.a_mean, state.b_mean),
        ProbeDirection::Backward => (state.b_mean, state.a_mean),
    };
    let c = C64::new(0.0, (2.0 * params.kappa_ext).sqrt());
    Ok(ProbeResult { t: 1.0 - c * pumped / s, r: -c * other / s, state, direction, s_in: s })
}

/// Largest relative deviation from ⟨c⟩(2s) = 2⟨c⟩(s) over both mode amplitudes.
/// Amplitudes below 1e-9 of the larger one are compared against that larger scale.
pub fn drive_linearity(atom: &AtomOperators, params: &SystemParams, direction: ProbeDirection, options: &ProbeOptions) -> Result<f64> {
    let s = options.input_amplitude(params);
    let one = probe_with_amplitude(atom, params, direction, options, s)?;
    let two = probe_with_amplitude(atom, params, direction, options, 2.0 * s)?;
    let pairs = [(one.state.a_mean, two.state.a_mean), (one.state.b_mean, two.state.b_mean)];
    let scale = pairs.iter().map(|(x, _)| x.norm()).fold(0.0, f64::max);
    Ok(pairs
        .iter()
        .map(|(x1, x2)| (x2 - 2.0 * x1).norm() / (2.0 * x1.norm()).max(2e-9 * scale).max(1e-300))
        .fold(0.0, f64::max))
}

/// Transmission and reflection amplitudes for both probe directions at one detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub delta: f64,
    pub t_fwd: C64,
    pub r_fwd: C64,
    pub t_bwd: C64,
    pub r_bwd: C64,
}

impl SpectrumPoint {
    /// [T_fwd, R_fwd, T_bwd, R_bwd].
    pub fn powers(&self) -> [f64; 4] {
        [self.t_fwd.norm_sqr(), self.r_fwd.norm_sqr(), self.t_bwd.norm_sqr(), self.r_bwd.norm_sqr()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub model: String,
    pub kappa_0: f64,
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumResult {
    pub const HEADER: [&'static str; 5] = ["delta_over_kappa0", "T_fwd", "R_fwd", "T_bwd", "R_bwd"];
}

/// 401 points over [−3g, 3g].
pub fn default_detuning_grid(g: f64) -> Vec<f64> {
    let n = 401;
    (0..n).map(|k| -3.0 * g + 6.0 * g * k as f64 / (n - 1) as f64).collect()
}

/// Master-equation spectrum. At each Δ the atom and resonator detunings are
/// Δ_AP = params.delta_ap + Δ and Δ_RP = params.delta_rp + Δ (co-resonant sweep by default).
pub fn spectrum(atom: &AtomOperators, params: &SystemParams, deltas: &[f64], options: &ProbeOptions) -> Result<SpectrumResult> {
    let points = deltas
        .par_iter()
        .map(|&delta| {
            let p = SystemParams { delta_ap: params.delta_ap + delta, delta_rp: params.delta_rp + delta, ..*params };
            let fwd = probe(atom, &p, ProbeDirection::Forward, options)?;
            let bwd = probe(atom, &p, ProbeDirection::Backward, options)?;
            Ok(SpectrumPoint { delta, t_fwd: fwd.t, r_fwd: fwd.r, t_bwd: bwd.t, r_bwd: bwd.r })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult { model: atom.label.clone(), kappa_0: params.kappa_0, points })
}
