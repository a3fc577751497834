//! Command implementations. Each returns the tabular artifact, its JSON form and a summary.

use serde::Serialize;
use serde_json::{json, Value};

use chiral_wgm::atom::{AtomOperators, AtomPreset, LinearDipole};
use chiral_wgm::chiral::{analytic_spectrum, resonator_betas, resonator_transmission, AnalyticInput, AnalyticModel};
use chiral_wgm::devices::{self, CirculatorParams, CwCouplingMode, DiodeParams, GroundState, Objective};
use chiral_wgm::export::{fmt_num, spectrum_table, Table};
use chiral_wgm::lindblad::{default_detuning_grid, spectrum, ProbeDirection, ProbeOptions, SystemParams};
use chiral_wgm::polarization::ModeOverlaps;
use chiral_wgm::units::mhz_to_rad;
use chiral_wgm::validation;
use chiral_wgm::wgm::{solve_resonance, ModeSpec, ProfileRow};
use chiral_wgm::Error;

use crate::config::*;

/// Exit 1 for invalid input, exit 2 for failures inside a numerical routine or while writing.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::UnsupportedModel(_)
            | Error::GridTooLarge(_)
            | Error::InvalidAngularMomenta(_)
            | Error::DimensionMismatch(_)
            | Error::OrderTooLarge(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Artifact {
    pub table: Table,
    pub json: Value,
    /// Figures of merit echoed to stdout and the manifest.
    pub summary: Value,
    /// Parameters after defaults were applied.
    pub resolved: Value,
    /// Non-zero exit requested despite a complete artifact.
    pub failed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn parse<T: serde::de::DeserializeOwned>(params: &Value) -> CliResult<T> {
    serde_json::from_value(params.clone()).map_err(|e| CliError::Config(format!("params: {e}")))
}

pub fn run(command: Command, params: &Value) -> CliResult<Artifact> {
    match command {
        Command::Mode => mode(parse(params)?),
        Command::Overlap => overlap(parse(params)?),
        Command::Spectrum => run_spectrum(parse(params)?),
        Command::Sweep => sweep(parse(params)?),
        Command::Diode => diode(parse(params)?),
        Command::Circulator => circulator(parse(params)?),
        Command::Sprint => sprint(parse(params)?),
        Command::Validate => validate(parse(params)?),
    }
}

fn mode_spec(p: &ModeParams) -> ModeSpec {
    ModeSpec { n0: p.n0, radius: p.radius_um * 1e-6, m: p.m, p: p.p, polarization: p.polarization }
}

fn mode(p: ModeParams) -> CliResult<Artifact> {
    let sol = solve_resonance(&mode_spec(&p))?;
    let rows = sol.radial_profile(&p.offsets_nm)?;
    let mut table = Table::new(&ProfileRow::HEADER);
    for r in &rows {
        table.push_numbers(&r.values());
    }
    let surface = sol.overlaps_at(sol.surface_radius())?;
    let summary = json!({
        "k_phi_R": sol.k_phi_r,
        "residual": sol.residual,
        "O_surface": surface.o,
        "alpha_sigma_plus_sq_surface": surface.alpha_sigma_plus().norm_sqr(),
    });
    Ok(Artifact { json: json!({ "summary": summary.clone(), "rows": table.rows }), table, summary, resolved: to_value(&p), failed: false })
}

fn overlap(p: ModeParams) -> CliResult<Artifact> {
    let sol = solve_resonance(&mode_spec(&p))?;
    let mut table = Table::new(&["r_minus_R_nm", "alpha_sp_sq", "alpha_pi_sq", "alpha_sm_sq", "O", "S_z_norm"]);
    let mut sets = Vec::new();
    for &off in &p.offsets_nm {
        let r = if off == 0.0 { sol.surface_radius() } else { sol.spec.radius + off * 1e-9 };
        let s = sol.overlaps_at(r)?;
        table.push_numbers(&[off, s.alpha_sigma_plus().norm_sqr(), s.alpha_pi().norm_sqr(), s.alpha_sigma_minus().norm_sqr(), s.o, s.s_z_norm]);
        sets.push(s);
    }
    let summary = json!({ "k_phi_R": sol.k_phi_r, "points": sets.len() });
    Ok(Artifact { json: to_value(&sets), table, summary, resolved: to_value(&p), failed: false })
}

fn grid_points(grid: &Grid, kappa_0: f64) -> CliResult<Vec<f64>> {
    if grid.points > 100_000 || !(grid.min_over_kappa0 <= grid.max_over_kappa0) {
        return Err(CliError::Config("grid needs min <= max and at most 1e5 points".into()));
    }
    Ok(match grid.points {
        0 => Vec::new(),
        1 => vec![grid.min_over_kappa0 * kappa_0],
        n => (0..n)
            .map(|k| kappa_0 * (grid.min_over_kappa0 + (grid.max_over_kappa0 - grid.min_over_kappa0) * k as f64 / (n - 1) as f64))
            .collect(),
    })
}

fn run_spectrum(p: SpectrumParams) -> CliResult<Artifact> {
    let params = SystemParams {
        g: mhz_to_rad(p.g_mhz),
        gamma: mhz_to_rad(p.gamma_mhz),
        kappa_0: mhz_to_rad(p.kappa0_mhz),
        kappa_ext: mhz_to_rad(p.kappa_ext_mhz),
        h: mhz_to_rad(p.h_mhz),
        delta_ap: mhz_to_rad(p.delta_ap_mhz),
        delta_rp: mhz_to_rad(p.delta_rp_mhz),
        b_field: p.b_gauss * 1e-4,
        overlaps: ModeOverlaps::transverse(p.alpha_sp_sq)?,
    };
    if !(params.kappa_0 > 0.0) {
        return Err(CliError::Config("kappa0_MHz must be positive".into()));
    }
    let deltas = match &p.grid {
        Some(g) => grid_points(g, params.kappa_0)?,
        None => default_detuning_grid(params.g),
    };
    let dipole = match p.model {
        SpectrumModel::LinearTwoLevel => Some(p.dipole.unwrap_or(LinearDipole::Radial)),
        _ => None,
    };
    let result = match p.solver {
        Solver::Analytic => {
            let model = match p.model {
                SpectrumModel::VSystem => AnalyticModel::VSystem,
                SpectrumModel::TwoLevelSigmaPlus => AnalyticModel::TwoLevelSigmaPlus,
                SpectrumModel::LinearTwoLevel => AnalyticModel::LinearTwoLevel,
                SpectrumModel::Hyperfine => return Err(CliError::Config("no closed form for the hyperfine model".into())),
            };
            analytic_spectrum(&AnalyticInput::from_params(&params, model, dipole)?, &deltas)?
        }
        Solver::Master => {
            let atom = match p.model {
                SpectrumModel::VSystem => AtomOperators::v_system(params.gamma),
                SpectrumModel::TwoLevelSigmaPlus => AtomOperators::two_level_sigma_plus(params.gamma),
                SpectrumModel::LinearTwoLevel => AtomOperators::linear_two_level(dipole.expect("set above"), params.gamma),
                SpectrumModel::Hyperfine => {
                    let mut spec = p.atom.clone().unwrap_or_else(AtomPreset::rb85_d2).to_spec()?;
                    spec.gamma = params.gamma;
                    AtomOperators::from_spec(&spec)?
                }
            };
            let options = ProbeOptions { n_max: p.n_max, drive: p.drive, ..Default::default() };
            spectrum(&atom, &params, &deltas, &options)?
        }
    };
    let table = spectrum_table(&result);
    let t_min = result.points.iter().map(|pt| pt.powers()[0]).fold(f64::INFINITY, f64::min);
    let summary = json!({ "model": result.model, "points": result.points.len(), "min_T_fwd": if t_min.is_finite() { Some(t_min) } else { None } });
    Ok(Artifact { json: to_value(&result), table, summary, resolved: to_value(&p), failed: false })
}

pub const MAX_SWEEP_POINTS: usize = 10_000;

fn axis_values(axis: &SweepAxis) -> CliResult<Vec<f64>> {
    if axis.log && !(axis.min > 0.0 && axis.max > 0.0) {
        return Err(CliError::Config(format!("log axis {} needs positive bounds", axis.name.label())));
    }
    let (a, b) = if axis.log { (axis.min.ln(), axis.max.ln()) } else { (axis.min, axis.max) };
    let raw: Vec<f64> = match axis.points {
        0 => Vec::new(),
        1 => vec![a],
        n => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    };
    Ok(if axis.log { raw.into_iter().map(f64::exp).collect() } else { raw })
}

fn sweep(p: SweepParams) -> CliResult<Artifact> {
    if p.axes.len() > 2 {
        return Err(Error::GridTooLarge(format!("{} axes given, at most 2 supported", p.axes.len())).into());
    }
    let total: usize = if p.axes.is_empty() { 0 } else { p.axes.iter().map(|a| a.points).product() };
    if total > MAX_SWEEP_POINTS {
        return Err(Error::GridTooLarge(format!("{total} points exceed {MAX_SWEEP_POINTS}")).into());
    }
    let mut header: Vec<&str> = p.axes.iter().map(|a| a.name.label()).collect();
    header.extend(p.observables.iter().map(|o| o.label()));
    let mut table = Table::new(&header);
    let axes: Vec<Vec<f64>> = p.axes.iter().map(axis_values).collect::<CliResult<_>>()?;
    let k0 = mhz_to_rad(p.kappa0_mhz);
    let mut combos: Vec<Vec<f64>> = if axes.is_empty() { Vec::new() } else { vec![Vec::new()] };
    for vals in &axes {
        combos = combos.into_iter().flat_map(|c| vals.iter().map(move |&v| [c.clone(), vec![v]].concat())).collect();
    }
    for combo in combos {
        let (mut g, mut kext, mut x) = (mhz_to_rad(p.g_mhz), p.kappa_ext_mhz.map(mhz_to_rad), p.alpha_sp_sq);
        for (axis, &v) in p.axes.iter().zip(&combo) {
            match axis.name {
                SweepAxisName::KappaExtOverKappa0 => kext = Some(v * k0),
                SweepAxisName::AlphaSpSq => x = Some(v),
                SweepAxisName::GOverKappa0 => g = v * k0,
            }
        }
        let kext = kext.ok_or_else(|| CliError::Config("kappa_ext_MHz or a kappa_ext_over_kappa0 axis is required".into()))?;
        let x = x.ok_or_else(|| CliError::Config("alpha_sp_sq or an alpha_sp_sq axis is required".into()))?;
        if !(0.0..=1.0).contains(&x) {
            return Err(CliError::Config(format!("alpha_sp_sq = {x} outside [0, 1]")));
        }
        let gamma = mhz_to_rad(p.gamma_mhz);
        let (tp, tm) = resonator_transmission(g, gamma, k0, kext, x)?;
        let betas = resonator_betas(g, gamma, k0, kext, x)?;
        let mut row = combo.clone();
        row.extend(p.observables.iter().map(|o| match o {
            Observable::TPlus => tp * tp,
            Observable::TMinus => tm * tm,
            Observable::BetaPlus => betas.beta_plus(),
            Observable::BetaMinus => betas.beta_minus(),
        }));
        table.push_numbers(&row);
    }
    let summary = json!({ "points": table.rows.len() });
    Ok(Artifact { json: json!({ "header": table.header, "rows": table.rows }), table, summary, resolved: to_value(&p), failed: false })
}

fn diode(p: DiodeConfig) -> CliResult<Artifact> {
    let g_ccw = mhz_to_rad(p.g_ccw_mhz);
    let g_cw = match (p.g_cw_mhz, p.cw_coupling) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either g_cw_MHz or cw_coupling, not both".into())),
        (Some(g), None) => mhz_to_rad(g),
        (None, mode) => {
            let spec = p.atom.clone().unwrap_or_else(AtomPreset::rb85_d2).to_spec()?;
            devices::cw_coupling_stretched(&spec, g_ccw, mode.unwrap_or(CwCouplingMode::DipoleRatio))?
        }
    };
    let params = DiodeParams { g_ccw, g_cw, gamma: mhz_to_rad(p.gamma_mhz), kappa_0: mhz_to_rad(p.kappa0_mhz), kappa_ext: mhz_to_rad(p.kappa_ext_mhz) };
    if !(params.kappa_0 > 0.0) {
        return Err(CliError::Config("kappa0_MHz must be positive".into()));
    }
    let deltas = match &p.grid {
        Some(g) => grid_points(g, params.kappa_0)?,
        None => default_detuning_grid(g_ccw.max(params.kappa_0)),
    };
    let res = devices::diode(&params, &deltas)?;
    let mut table = Table::new(&["delta_over_kappa0", "T12", "T21"]);
    for ((d, a), b) in res.deltas.iter().zip(&res.t12).zip(&res.t21) {
        table.push_numbers(&[d / params.kappa_0, *a, *b]);
    }
    let iso = if res.isolation_db.is_finite() { json!(res.isolation_db) } else { json!(res.isolation_db.to_string()) };
    let summary = json!({ "isolation_dB": iso, "g_cw_MHz": chiral_wgm::units::rad_to_mhz(g_cw) });
    let mut resolved = to_value(&p);
    resolved["g_cw_MHz_resolved"] = json!(chiral_wgm::units::rad_to_mhz(g_cw));
    Ok(Artifact { json: json!({ "summary": summary.clone(), "rows": table.rows }), table, summary, resolved, failed: false })
}

fn circulator(p: CirculatorConfig) -> CliResult<Artifact> {
    let mut params = CirculatorParams {
        g: mhz_to_rad(p.g_mhz),
        g_weak: mhz_to_rad(p.g_weak_mhz),
        gamma: mhz_to_rad(p.gamma_mhz),
        kappa_0: mhz_to_rad(p.kappa0_mhz),
        kappa_a: mhz_to_rad(p.kappa_a_mhz),
        kappa_b: mhz_to_rad(p.kappa_b_mhz.unwrap_or(p.kappa_a_mhz)),
    };
    let mut optimum = Value::Null;
    if let Some(range) = p.optimize {
        let objective = Objective::CirculatorFidelity { g: params.g, g_weak: params.g_weak, gamma: params.gamma, kappa_0: params.kappa_0, spin: p.spin };
        let opt = devices::optimize_kappa(&objective, mhz_to_rad(range.min_mhz), mhz_to_rad(range.max_mhz))?;
        params.kappa_a = opt.kappa;
        params.kappa_b = opt.kappa;
        optimum = json!({
            "kappa_MHz": chiral_wgm::units::rad_to_mhz(opt.kappa),
            "kappa_tot_over_2kappa0": (params.kappa_0 + 2.0 * opt.kappa) / (2.0 * params.kappa_0),
            "fidelity": opt.value,
            "unimodal": opt.unimodal,
        });
    }
    let res = devices::circulator(&params, p.spin)?;
    let mut table = Table::new(&["from_port", "to_port", "T"]);
    for (i, row) in res.matrix.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            table.push(vec![(i + 1).to_string(), (j + 1).to_string(), fmt_num(*t)]);
        }
    }
    let summary = json!({ "fidelity": res.fidelity, "insertion_loss_dB": res.insertion_loss_db, "optimum": optimum });
    Ok(Artifact { json: json!({ "result": to_value(&res), "summary": summary.clone() }), table, summary, resolved: to_value(&p), failed: false })
}

fn sprint(p: SprintConfig) -> CliResult<Artifact> {
    let (g, gamma, k0) = (mhz_to_rad(p.g_mhz), mhz_to_rad(p.gamma_mhz), mhz_to_rad(p.kappa0_mhz));
    let kext = p.kappa_ext_mhz.map(mhz_to_rad).unwrap_or_else(|| devices::sprint_critical_kappa(g, gamma, k0));
    let res = devices::sprint(g, gamma, k0, kext)?;
    let mut table = Table::new(&["direction", "initial_m", "t", "r"]);
    for (dir, dl) in [(ProbeDirection::Forward, "+"), (ProbeDirection::Backward, "-")] {
        for (state, sl) in [(GroundState::MinusOne, "-1"), (GroundState::PlusOne, "+1")] {
            let (t, r) = res.amplitudes(dir, state);
            table.push(vec![dl.into(), sl.into(), fmt_num(t), fmt_num(r)]);
        }
    }
    let summary = json!({ "kappa_ext_MHz": chiral_wgm::units::rad_to_mhz(kext), "swap_efficiency": res.r_interacting.powi(2) });
    let mut resolved = to_value(&p);
    resolved["kappa_ext_MHz"] = json!(chiral_wgm::units::rad_to_mhz(kext));
    Ok(Artifact { json: json!({ "result": to_value(&res), "summary": summary.clone() }), table, summary, resolved, failed: false })
}

fn validate(p: ValidateConfig) -> CliResult<Artifact> {
    let (_, rows) = validation::run_suite(p.n_per_model, p.seed)?;
    let mut table = Table::new(&["check", "value", "limit", "status"]);
    for r in &rows {
        table.push(vec![r.name.clone(), fmt_num(r.value), fmt_num(r.limit), if r.passed { "PASS".into() } else { "FAIL".into() }]);
    }
    let failed = rows.iter().any(|r| !r.passed);
    let summary = json!({ "checks": rows.len(), "failed": rows.iter().filter(|r| !r.passed).count() });
    Ok(Artifact { json: to_value(&rows), table, summary, resolved: to_value(&p), failed })
}
