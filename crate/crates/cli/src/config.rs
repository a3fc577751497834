//! Run configuration. Rates are in MHz (ordinary frequency) and converted to rad/s on use.

use serde::{Deserialize, Serialize};

use chiral_wgm::atom::{AtomPreset, LinearDipole};
use chiral_wgm::devices::{CwCouplingMode, Spin};
use chiral_wgm::export::OutputFormat;
use chiral_wgm::wgm::Polarization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Mode,
    Overlap,
    Spectrum,
    Sweep,
    Diode,
    Circulator,
    Sprint,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mode => "mode",
            Command::Overlap => "overlap",
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Diode => "diode",
            Command::Circulator => "circulator",
            Command::Sprint => "sprint",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<OutputFormat>,
}

/// Top level of a config file. `params` is checked against the command's schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output: OutputSpec,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

fn default_offsets() -> Vec<f64> {
    (0..=100).map(|k| 5.0 * k as f64).collect()
}

/// Shared by `mode` and `overlap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeParams {
    pub n0: f64,
    pub radius_um: f64,
    pub m: u32,
    #[serde(default)]
    pub p: u32,
    pub polarization: Polarization,
    /// Radial positions relative to the surface; 0 is evaluated just outside it.
    #[serde(default = "default_offsets")]
    pub offsets_nm: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    VSystem,
    TwoLevelSigmaPlus,
    LinearTwoLevel,
    /// Full hyperfine manifold from `atom`.
    Hyperfine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Master,
    Analytic,
}

/// Detuning grid in units of κ_0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min_over_kappa0: f64,
    pub max_over_kappa0: f64,
    pub points: usize,
}

fn default_n_max() -> usize {
    2
}

fn default_drive() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub model: SpectrumModel,
    #[serde(default)]
    pub solver: Solver,
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "kappa0_MHz")]
    pub kappa0_mhz: f64,
    #[serde(rename = "kappa_ext_MHz")]
    pub kappa_ext_mhz: f64,
    #[serde(rename = "h_MHz", default)]
    pub h_mhz: f64,
    #[serde(rename = "delta_ap_MHz", default)]
    pub delta_ap_mhz: f64,
    #[serde(rename = "delta_rp_MHz", default)]
    pub delta_rp_mhz: f64,
    #[serde(default)]
    pub b_gauss: f64,
    pub alpha_sp_sq: f64,
    #[serde(default)]
    pub dipole: Option<LinearDipole>,
    #[serde(default)]
    pub atom: Option<AtomPreset>,
    /// Defaults to 401 points over [−3g, 3g].
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Input amplitude in units of √κ_0.
    #[serde(default = "default_drive")]
    pub drive: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxisName {
    #[serde(rename = "kappa_ext_over_kappa0")]
    KappaExtOverKappa0,
    #[serde(rename = "alpha_sp_sq")]
    AlphaSpSq,
    #[serde(rename = "g_over_kappa0")]
    GOverKappa0,
}

impl SweepAxisName {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxisName::KappaExtOverKappa0 => "kappa_ext_over_kappa0",
            SweepAxisName::AlphaSpSq => "alpha_sp_sq",
            SweepAxisName::GOverKappa0 => "g_over_kappa0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: SweepAxisName,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "T_plus")]
    TPlus,
    #[serde(rename = "T_minus")]
    TMinus,
    #[serde(rename = "beta_plus")]
    BetaPlus,
    #[serde(rename = "beta_minus")]
    BetaMinus,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Observable::TPlus, Observable::TMinus, Observable::BetaPlus, Observable::BetaMinus];

    pub fn label(&self) -> &'static str {
        match self {
            Observable::TPlus => "T_plus",
            Observable::TMinus => "T_minus",
            Observable::BetaPlus => "beta_plus",
            Observable::BetaMinus => "beta_minus",
        }
    }
}

fn all_observables() -> Vec<Observable> {
    Observable::ALL.to_vec()
}

/// On-resonance resonator sweep; axes override the base values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "kappa0_MHz")]
    pub kappa0_mhz: f64,
    #[serde(rename = "kappa_ext_MHz", default)]
    pub kappa_ext_mhz: Option<f64>,
    #[serde(default)]
    pub alpha_sp_sq: Option<f64>,
    pub axes: Vec<SweepAxis>,
    #[serde(default = "all_observables")]
    pub observables: Vec<Observable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeConfig {
    #[serde(rename = "g_ccw_MHz")]
    pub g_ccw_mhz: f64,
    /// Explicit weak coupling; otherwise derived from `cw_coupling` and `atom`.
    #[serde(rename = "g_cw_MHz", default)]
    pub g_cw_mhz: Option<f64>,
    #[serde(default)]
    pub cw_coupling: Option<CwCouplingMode>,
    #[serde(default)]
    pub atom: Option<AtomPreset>,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "kappa0_MHz")]
    pub kappa0_mhz: f64,
    #[serde(rename = "kappa_ext_MHz")]
    pub kappa_ext_mhz: f64,
    #[serde(default)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaRange {
    #[serde(rename = "min_MHz")]
    pub min_mhz: f64,
    #[serde(rename = "max_MHz")]
    pub max_mhz: f64,
}

fn default_spin() -> Spin {
    Spin::Plus
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculatorConfig {
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
    #[serde(rename = "g_weak_MHz", default)]
    pub g_weak_mhz: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "kappa0_MHz")]
    pub kappa0_mhz: f64,
    #[serde(rename = "kappa_a_MHz")]
    pub kappa_a_mhz: f64,
    /// Defaults to κ_A.
    #[serde(rename = "kappa_b_MHz", default)]
    pub kappa_b_mhz: Option<f64>,
    #[serde(default = "default_spin")]
    pub spin: Spin,
    /// Search κ_A = κ_B for maximal fidelity in this range.
    #[serde(default)]
    pub optimize: Option<KappaRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SprintConfig {
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
    #[serde(rename = "kappa0_MHz")]
    pub kappa0_mhz: f64,
    /// Defaults to the critical coupling of the interacting channel.
    #[serde(rename = "kappa_ext_MHz", default)]
    pub kappa_ext_mhz: Option<f64>,
}

fn default_cases() -> usize {
    50
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    #[serde(default = "default_cases")]
    pub n_per_model: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}
