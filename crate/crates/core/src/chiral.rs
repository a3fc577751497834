//! Closed-form weak-drive steady states of the three canonical atom models and the directional
//! beta-factor calculus for chiral waveguide and resonator couplings.
//!
//! With γ̃ = γ + iΔ_AP, κ̃ = κ_ext + κ_0 + iΔ_RP and c = √(2κ_ext), the mode amplitudes per unit
//! input amplitude are
//!
//! * V-system: ⟨a⟩ = −ic γ̃(g² + γ̃κ̃)/D, ⟨b⟩ = ic γ̃ g² P*/D with
//!   D = γ̃κ̃(2g² + γ̃κ̃) + g⁴(1 − |P|²) and P = Σ_q α_q β_q*. For time-reversed modes
//!   1 − |P|² = (2|α_σ+|² − 1)² and P* = 2α_σ+* β_σ+.
//! * Two-level atom with overlaps A (mode a) and B (mode b), A = α_σ+ for a σ+ transition and
//!   A = α_lin for a linear dipole: ⟨a⟩ = −ic(κ̃γ̃ + g²|B|²)/(κ̃(κ̃γ̃ + g²(|A|² + |B|²))),
//!   ⟨b⟩ = ic g² A* B/(κ̃(κ̃γ̃ + g²(|A|² + |B|²))).

use serde::{Deserialize, Serialize};

use crate::atom::LinearDipole;
use crate::error::{Error, Result};
use crate::lindblad::{ProbeDirection, SpectrumPoint, SpectrumResult, SystemParams};
use crate::polarization::ModeOverlaps;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticModel {
    VSystem,
    TwoLevelSigmaPlus,
    LinearTwoLevel,
}

impl AnalyticModel {
    pub fn name(&self) -> &'static str {
        match self {
            AnalyticModel::VSystem => "v_system",
            AnalyticModel::TwoLevelSigmaPlus => "two_level_sigma_plus",
            AnalyticModel::LinearTwoLevel => "linear_two_level",
        }
    }
}

/// Rates and detunings (rad/s), mode overlaps and model choice for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticInput {
    pub g: f64,
    pub gamma: f64,
    pub kappa_0: f64,
    pub kappa_ext: f64,
    pub delta_ap: f64,
    pub delta_rp: f64,
    pub overlaps: ModeOverlaps,
    pub model: AnalyticModel,
    /// Dipole orientation, required for [`AnalyticModel::LinearTwoLevel`].
    pub linear_dipole: Option<LinearDipole>,
}

/// Closed-form amplitudes per unit input and the waveguide response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticResponse {
    pub a_mean: C64,
    pub b_mean: C64,
    pub t: C64,
    pub r: C64,
}

impl AnalyticInput {
    /// Takes rates, detunings and overlaps from master-equation parameters. The closed forms hold
    /// without mode-mode coupling and Zeeman splitting only.
    pub fn from_params(params: &SystemParams, model: AnalyticModel, linear_dipole: Option<LinearDipole>) -> Result<Self> {
        if params.h != 0.0 {
            return Err(Error::UnsupportedModel("closed forms require h = 0".into()));
        }
        if params.b_field != 0.0 {
            return Err(Error::UnsupportedModel("closed forms require B = 0".into()));
        }
        Ok(AnalyticInput {
            g: params.g,
            gamma: params.gamma,
            kappa_0: params.kappa_0,
            kappa_ext: params.kappa_ext,
            delta_ap: params.delta_ap,
            delta_rp: params.delta_rp,
            overlaps: params.overlaps,
            model,
            linear_dipole,
        })
    }

    pub fn alpha_sp_sq(&self) -> f64 {
        self.overlaps.alpha.sigma_plus.norm_sqr()
    }

    /// α_lin = Σ_q α_q c_q.
    pub fn alpha_lin(&self) -> Result<C64> {
        let d = self.dipole()?;
        Ok(self.overlaps.alpha.project(&d.components()))
    }

    fn dipole(&self) -> Result<LinearDipole> {
        self.linear_dipole.ok_or_else(|| Error::UnsupportedModel("linear_two_level needs a dipole orientation".into()))
    }

    fn validate(&self) -> Result<()> {
        let x = self.alpha_sp_sq();
        if !(0.0..=1.0 + 1e-12).contains(&x) {
            return Err(Error::Domain(format!("|alpha_sigma+|^2 = {x} outside [0, 1]")));
        }
        if self.gamma < 0.0 || self.kappa_0 < 0.0 || self.kappa_ext < 0.0 {
            return Err(Error::Domain("decay rates must be non-negative".into()));
        }
        Ok(())
    }
}

/// ⟨a⟩, ⟨b⟩ per unit input into mode a.
fn forward_amplitudes(input: &AnalyticInput, overlaps: &ModeOverlaps) -> Result<(C64, C64)> {
    let i = C64::new(0.0, 1.0);
    let c = (2.0 * input.kappa_ext).sqrt();
    let gt = C64::new(input.gamma, input.delta_ap);
    let kt = C64::new(input.kappa_ext + input.kappa_0, input.delta_rp);
    let g2 = input.g * input.g;
    match input.model {
        AnalyticModel::VSystem => {
            let p = overlaps.alpha.inner(&overlaps.beta);
            let d = gt * kt * (2.0 * g2 + gt * kt) + g2 * g2 * (1.0 - p.norm_sqr());
            Ok((-i * c * gt * (g2 + gt * kt) / d, i * c * gt * g2 * p.conj() / d))
        }
        AnalyticModel::TwoLevelSigmaPlus | AnalyticModel::LinearTwoLevel => {
            let (a_ov, b_ov) = if input.model == AnalyticModel::TwoLevelSigmaPlus {
                (overlaps.alpha.sigma_plus, overlaps.beta.sigma_plus)
            } else {
                let comps = input.dipole()?.components();
                (overlaps.alpha.project(&comps), overlaps.beta.project(&comps))
            };
            let den = kt * (kt * gt + g2 * (a_ov.norm_sqr() + b_ov.norm_sqr()));
            Ok((-i * c * (kt * gt + g2 * b_ov.norm_sqr()) / den, i * c * g2 * a_ov.conj() * b_ov / den))
        }
    }
}

/// Closed-form steady state for a probe in the given direction. Backward probing exchanges the
/// roles of the two modes.
pub fn analytic_modes(input: &AnalyticInput, direction: ProbeDirection) -> Result<AnalyticResponse> {
    input.validate()?;
    let c = C64::new(0.0, (2.0 * input.kappa_ext).sqrt());
    match direction {
        ProbeDirection::Forward => {
            let (a, b) = forward_amplitudes(input, &input.overlaps)?;
            Ok(AnalyticResponse { a_mean: a, b_mean: b, t: 1.0 - c * a, r: -c * b })
        }
        ProbeDirection::Backward => {
            let (pumped, other) = forward_amplitudes(input, &input.overlaps.swapped())?;
            Ok(AnalyticResponse { a_mean: other, b_mean: pumped, t: 1.0 - c * pumped, r: -c * other })
        }
    }
}

/// Closed-form spectrum with Δ_AP = input.delta_ap + Δ and Δ_RP = input.delta_rp + Δ.
pub fn analytic_spectrum(input: &AnalyticInput, deltas: &[f64]) -> Result<SpectrumResult> {
    let points = deltas
        .iter()
        .map(|&delta| {
            let p = AnalyticInput { delta_ap: input.delta_ap + delta, delta_rp: input.delta_rp + delta, ..*input };
            let f = analytic_modes(&p, ProbeDirection::Forward)?;
            let b = analytic_modes(&p, ProbeDirection::Backward)?;
            Ok(SpectrumPoint { delta, t_fwd: f.t, r_fwd: f.r, t_bwd: b.t, r_bwd: b.r })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult { model: input.model.name().into(), kappa_0: input.kappa_0, points })
}

/// Directional coupling fractions of up to two transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiralCoupling {
    pub beta_plus_1: f64,
    pub beta_minus_1: f64,
    pub beta_plus_2: f64,
    pub beta_minus_2: f64,
}

impl ChiralCoupling {
    /// Single transition.
    pub fn two_level(beta_plus: f64, beta_minus: f64) -> Self {
        ChiralCoupling { beta_plus_1: beta_plus, beta_minus_1: beta_minus, beta_plus_2: 0.0, beta_minus_2: 0.0 }
    }

    pub fn beta_plus(&self) -> f64 {
        self.beta_plus_1 + self.beta_plus_2
    }

    pub fn beta_minus(&self) -> f64 {
        self.beta_minus_1 + self.beta_minus_2
    }

    pub fn beta_total(&self) -> f64 {
        self.beta_plus() + self.beta_minus()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.beta_plus_1, self.beta_minus_1, self.beta_plus_2, self.beta_minus_2];
        if let Some(b) = all.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::Domain(format!("beta factor {b} outside [0, 1]")));
        }
        if self.beta_plus_1 + self.beta_minus_1 > 1.0 + 1e-12 || self.beta_plus_2 + self.beta_minus_2 > 1.0 + 1e-12 {
            return Err(Error::Domain("directional betas of one transition exceed 1".into()));
        }
        Ok(())
    }
}

/// On-resonance waveguide amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiralAmplitudes {
    pub t_plus: f64,
    pub t_minus: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

/// t± = 1 − 2(β±⁽¹⁾ + β±⁽²⁾), r± = −2√(β+⁽¹⁾β−⁽¹⁾) − 2√(β+⁽²⁾β−⁽²⁾).
pub fn beta_to_tr(coupling: &ChiralCoupling) -> Result<ChiralAmplitudes> {
    coupling.validate()?;
    let r = -2.0 * (coupling.beta_plus_1 * coupling.beta_minus_1).sqrt() - 2.0 * (coupling.beta_plus_2 * coupling.beta_minus_2).sqrt();
    Ok(ChiralAmplitudes { t_plus: 1.0 - 2.0 * coupling.beta_plus(), t_minus: 1.0 - 2.0 * coupling.beta_minus(), r_plus: r, r_minus: r })
}

fn check_rates(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64) -> Result<f64> {
    if !(gamma > 0.0) || kappa_0 < 0.0 || kappa_ext < 0.0 || !(kappa_0 + kappa_ext > 0.0) || !g.is_finite() {
        return Err(Error::Domain("need γ > 0, κ_0, κ_ext ≥ 0 and κ_0 + κ_ext > 0".into()));
    }
    Ok(g * g / gamma)
}

/// Beta factors of a two-level atom in a waveguide-coupled resonator. The forward channel is
/// carried by the CCW mode (transition 1) and the backward channel by the CW mode (transition 2):
/// β± = κ_ext/(κ_0+κ_ext) · (G w± + κ_0 + κ_ext)/(G + κ_0 + κ_ext), G = g²/γ,
/// w+ = 1 − |α_σ+|², w− = |α_σ+|².
pub fn resonator_betas(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64, alpha_sp_sq: f64) -> Result<ChiralCoupling> {
    let big_g = check_rates(g, gamma, kappa_0, kappa_ext)?;
    let k = kappa_0 + kappa_ext;
    let base = kappa_ext / k / (big_g + k);
    Ok(ChiralCoupling {
        beta_plus_1: base * (big_g * (1.0 - alpha_sp_sq) + k),
        beta_minus_1: 0.0,
        beta_plus_2: 0.0,
        beta_minus_2: base * (big_g * alpha_sp_sq + k),
    })
}

/// On-resonance t± = (κ_0² − κ_ext² + G(±(2|α_σ+|² − 1)κ_ext + κ_0)) / ((κ_ext + κ_0)(κ_ext + κ_0 + G)).
pub fn resonator_transmission(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64, alpha_sp_sq: f64) -> Result<(f64, f64)> {
    let big_g = check_rates(g, gamma, kappa_0, kappa_ext)?;
    let chi = 2.0 * alpha_sp_sq - 1.0;
    let den = (kappa_ext + kappa_0) * (kappa_ext + kappa_0 + big_g);
    let num = |s: f64| kappa_0 * kappa_0 - kappa_ext * kappa_ext + big_g * (s * chi * kappa_ext + kappa_0);
    Ok((num(1.0) / den, num(-1.0) / den))
}

/// On-resonance reflection for |α_σ+|² = 1/2: (G κ_ext/(κ_0 + κ_ext)) / (κ_0 + G + κ_ext).
pub fn symmetric_reflection(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64) -> Result<f64> {
    let big_g = check_rates(g, gamma, kappa_0, kappa_ext)?;
    Ok(big_g * kappa_ext / (kappa_0 + kappa_ext) / (kappa_0 + big_g + kappa_ext))
}

/// Fast-cavity regime κ_ext > g > κ_0, γ.
pub fn is_fast_cavity_regime(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64) -> bool {
    kappa_ext > g && g > kappa_0 && g > gamma
}
