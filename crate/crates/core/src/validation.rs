//! Oracle-equivalence suite: master-equation steady states against the closed forms on random
//! parameter sets, with the solver hygiene figures of every run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::atom::{AtomOperators, LinearDipole};
use crate::chiral::{analytic_modes, AnalyticInput, AnalyticModel};
use crate::error::Result;
use crate::lindblad::{drive_linearity, probe, ProbeDirection, ProbeOptions, SystemParams};
use crate::polarization::ModeOverlaps;

/// Relative agreement |x − y| ≤ rel·|y| + 1e-12.
pub const ORACLE_REL_TOL: f64 = 1e-5;
pub const LINEARITY_TOL: f64 = 1e-4;

/// Scaled deviation; values ≤ 1 pass.
pub fn scaled_error(x: crate::C64, y: crate::C64, rel: f64) -> f64 {
    (x - y).norm() / (rel * y.norm() + 1e-12)
}

/// Random rates in units of κ_0 = 1: g ∈ [0.1, 30], γ, κ_ext ∈ [0.5, 2], |α_σ+|² ∈ [0, 1] and a
/// co-resonant detuning Δ ∈ [−3g, 3g].
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let g = rng.gen_range(0.1..=30.0);
    let delta = rng.gen_range(-3.0 * g..=3.0 * g);
    SystemParams {
        g,
        gamma: rng.gen_range(0.5..=2.0),
        kappa_0: 1.0,
        kappa_ext: rng.gen_range(0.5..=2.0),
        h: 0.0,
        delta_ap: delta,
        delta_rp: delta,
        b_field: 0.0,
        overlaps: ModeOverlaps::transverse(rng.gen_range(0.0..=1.0)).expect("x in [0, 1]"),
    }
}

fn operators(model: AnalyticModel, gamma: f64) -> (AtomOperators, Option<LinearDipole>) {
    match model {
        AnalyticModel::VSystem => (AtomOperators::v_system(gamma), None),
        AnalyticModel::TwoLevelSigmaPlus => (AtomOperators::two_level_sigma_plus(gamma), None),
        AnalyticModel::LinearTwoLevel => (AtomOperators::linear_two_level(LinearDipole::Radial, gamma), Some(LinearDipole::Radial)),
    }
}

/// One random case probed in both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub params: SystemParams,
    /// Worst scaled t and r deviation over both directions.
    pub t_error: f64,
    pub r_error: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub top_shell_population: f64,
    pub linearity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub model: AnalyticModel,
    pub cases: Vec<CaseResult>,
}

impl ModelReport {
    fn worst(&self, f: impl Fn(&CaseResult) -> f64) -> f64 {
        self.cases.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_t_error(&self) -> f64 {
        self.worst(|c| c.t_error)
    }

    pub fn max_r_error(&self) -> f64 {
        self.worst(|c| c.r_error)
    }

    pub fn max_trace_error(&self) -> f64 {
        self.worst(|c| c.trace_error)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.worst(|c| c.hermiticity_error)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        -self.worst(|c| -c.min_eigenvalue)
    }

    pub fn max_top_shell(&self) -> f64 {
        self.worst(|c| c.top_shell_population)
    }

    pub fn max_linearity(&self) -> f64 {
        self.worst(|c| c.linearity)
    }

    pub fn oracle_passed(&self) -> bool {
        self.max_t_error() <= 1.0 && self.max_r_error() <= 1.0
    }
}

fn run_case(model: AnalyticModel, params: SystemParams, options: &ProbeOptions) -> Result<CaseResult> {
    let (atom, dipole) = operators(model, params.gamma);
    let input = AnalyticInput::from_params(&params, model, dipole)?;
    let mut out = CaseResult {
        params,
        t_error: 0.0,
        r_error: 0.0,
        trace_error: 0.0,
        hermiticity_error: 0.0,
        min_eigenvalue: f64::INFINITY,
        top_shell_population: 0.0,
        linearity: 0.0,
    };
    for dir in [ProbeDirection::Forward, ProbeDirection::Backward] {
        let exact = analytic_modes(&input, dir)?;
        let num = probe(&atom, &params, dir, options)?;
        let d = &num.state.diagnostics;
        out.t_error = out.t_error.max(scaled_error(num.t, exact.t, ORACLE_REL_TOL));
        out.r_error = out.r_error.max(scaled_error(num.r, exact.r, ORACLE_REL_TOL));
        out.trace_error = out.trace_error.max(d.trace_error);
        out.hermiticity_error = out.hermiticity_error.max(d.hermiticity_error);
        out.min_eigenvalue = out.min_eigenvalue.min(d.min_eigenvalue);
        out.top_shell_population = out.top_shell_population.max(num.state.top_shell_population);
        out.linearity = out.linearity.max(drive_linearity(&atom, &params, dir, options)?);
    }
    Ok(out)
}

/// `n` random cases for one model, reproducible from `seed`.
pub fn oracle_equivalence(model: AnalyticModel, n: usize, seed: u64, options: &ProbeOptions) -> Result<ModelReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<SystemParams> = (0..n).map(|_| random_params(&mut rng)).collect();
    let cases = params.into_par_iter().map(|p| run_case(model, p, options)).collect::<Result<Vec<_>>>()?;
    Ok(ModelReport { model, cases })
}

/// One line of the validation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckRow {
    fn at_most(name: String, value: f64, limit: f64) -> Self {
        CheckRow { name, value, limit, passed: value <= limit }
    }
}

pub const MODELS: [AnalyticModel; 3] = [AnalyticModel::VSystem, AnalyticModel::TwoLevelSigmaPlus, AnalyticModel::LinearTwoLevel];

/// Oracle equivalence and solver hygiene for all three models.
pub fn run_suite(n_per_model: usize, seed: u64) -> Result<(Vec<ModelReport>, Vec<CheckRow>)> {
    let options = ProbeOptions::default();
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for (k, model) in MODELS.into_iter().enumerate() {
        let rep = oracle_equivalence(model, n_per_model, seed.wrapping_add(k as u64), &options)?;
        let name = model.name();
        rows.push(CheckRow::at_most(format!("{name}: t vs closed form (scaled)"), rep.max_t_error(), 1.0));
        rows.push(CheckRow::at_most(format!("{name}: r vs closed form (scaled)"), rep.max_r_error(), 1.0));
        rows.push(CheckRow::at_most(format!("{name}: |tr rho - 1|"), rep.max_trace_error(), 1e-9));
        rows.push(CheckRow::at_most(format!("{name}: hermiticity"), rep.max_hermiticity_error(), 1e-10));
        rows.push(CheckRow::at_most(format!("{name}: -min eigenvalue"), -rep.min_eigenvalue(), 1e-8));
        rows.push(CheckRow::at_most(format!("{name}: top Fock shell"), rep.max_top_shell(), 1e-6));
        rows.push(CheckRow::at_most(format!("{name}: drive linearity"), rep.max_linearity(), LINEARITY_TOL));
        reports.push(rep);
    }
    Ok((reports, rows))
}
