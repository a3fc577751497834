//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use chiral_wgm::atom::{dipole_table, AtomOperators, AtomPreset};
use chiral_wgm::chiral::*;
use chiral_wgm::devices::*;
use chiral_wgm::lindblad::{default_detuning_grid, drive_linearity, probe, ProbeDirection, ProbeOptions, SteadyState, SystemParams, TRUNCATION_THRESHOLD};
use chiral_wgm::polarization::ModeOverlaps;
use chiral_wgm::specfun::{bessel_j_with_derivative, bessel_jy, bessel_y_log, wigner_3j, wigner_6j, HalfInt};
use chiral_wgm::validation::{oracle_equivalence, ModelReport, LINEARITY_TOL, MODELS};
use chiral_wgm::wgm::{solve_resonance, ModeSpec, Polarization};
use chiral_wgm::C64;
use common::{triangle, CgOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag plus a one-line account of the measured values.
struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn mhz(x: f64) -> f64 {
    TAU * 1e6 * x
}

fn fig3_spec(p: u32) -> ModeSpec {
    ModeSpec { n0: 1.45, radius: 20e-6, m: 206, p, polarization: Polarization::TM }
}

fn wgm_anchors() -> Outcome {
    let t0 = Instant::now();
    let sol = solve_resonance(&fig3_spec(0)).expect("p = 0 root");
    let r = sol.surface_radius();
    let field = sol.field_at(r, chiral_wgm::wgm::Direction::Ccw).expect("field");
    let set = sol.overlaps_at(r).expect("overlaps");
    let elapsed = t0.elapsed();
    let ratio = field.e_phi.norm() / field.e_r.norm();
    let a_sp = set.alpha_sigma_plus().norm();
    let ok = (ratio - 0.70).abs() <= 0.05 && (a_sp - 0.97).abs() <= 0.01 && (set.o - 0.10).abs() <= 0.02 && elapsed < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "|E_phi/E_r| = {ratio:.4} (0.70 +- 0.05), |alpha_s+| = {a_sp:.4} (0.97 +- 0.01; |alpha_s+|^2 = {:.4}), O = {:.4} (0.10 +- 0.02), {:.0} ms",
            a_sp * a_sp,
            set.o,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

/// Reference f = k n0 R / m for p = 0..3, evaluated with 40-digit arithmetic.
const TM_ROOTS: [f64; 4] = [1.05057178705526, 1.09188238194475, 1.12638451417185, 1.15738254524555];

fn resonance_roots() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut last = 0.0;
    for p in 0..4u32 {
        let sol = solve_resonance(&fig3_spec(p)).expect("root");
        // Independent evaluation of the TM matching condition (1/n0) J'/J = Y'/Y.
        let n0 = 1.45;
        let k_r = sol.f_p_m * 206.0 / n0;
        let (j, jp) = bessel_j_with_derivative(206, n0 * k_r).unwrap();
        let y = bessel_y_log(206, k_r).unwrap();
        let residual = ((jp / j) / n0 - y.log_derivative).abs() / y.log_derivative.abs();
        let minima = sol.interior_minima(4000).unwrap();
        let order_ok = sol.f_p_m > last && (sol.f_p_m / TM_ROOTS[p as usize] - 1.0).abs() < 1e-12;
        last = sol.f_p_m;
        ok &= residual < 1e-9 && order_ok && minima == p as usize;
        notes.push(format!("p={p}: residual {residual:.1e}, minima {minima}"));
    }
    let elapsed = t0.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    outcome(ok, format!("{}; {:.2} s", notes.join(", "), elapsed.as_secs_f64()))
}

fn oracle_reports() -> (Vec<ModelReport>, Duration) {
    let t0 = Instant::now();
    let reports = MODELS
        .iter()
        .enumerate()
        .map(|(k, &m)| oracle_equivalence(m, 50, 2024 + k as u64, &ProbeOptions::default()).expect("oracle run"))
        .collect();
    (reports, t0.elapsed())
}

fn oracle_equivalence_criterion(reports: &[ModelReport], elapsed: Duration) -> Outcome {
    let mut ok = elapsed < Duration::from_secs(600);
    let mut notes = Vec::new();
    for r in reports {
        ok &= r.cases.len() == 50 && r.oracle_passed();
        notes.push(format!("{}: t {:.2}, r {:.2}", r.model.name(), r.max_t_error(), r.max_r_error()));
    }
    outcome(ok, format!("worst scaled deviations (limit 1) {}; {:.1} s", notes.join(", "), elapsed.as_secs_f64()))
}

struct SpectrumRun {
    deltas: Vec<f64>,
    t: Vec<f64>,
    states: Vec<SteadyState>,
}

fn fig4_params(x: f64) -> SystemParams {
    SystemParams { g: 20.0, gamma: 1.0, kappa_0: 1.0, kappa_ext: 1.0, h: 0.0, delta_ap: 0.0, delta_rp: 0.0, b_field: 0.0, overlaps: ModeOverlaps::transverse(x).unwrap() }
}

fn forward_spectrum(atom: &AtomOperators, base: &SystemParams) -> SpectrumRun {
    let deltas = default_detuning_grid(base.g);
    let mut t = Vec::new();
    let mut states = Vec::new();
    for &d in &deltas {
        let p = SystemParams { delta_ap: d, delta_rp: d, ..*base };
        let res = probe(atom, &p, ProbeDirection::Forward, &ProbeOptions::default()).expect("probe");
        t.push(res.t.norm_sqr());
        states.push(res.state);
    }
    SpectrumRun { deltas, t, states }
}

fn local_minima(run: &SpectrumRun) -> Vec<f64> {
    (1..run.t.len() - 1).filter(|&k| run.t[k] < run.t[k - 1] && run.t[k] < run.t[k + 1]).map(|k| run.deltas[k]).collect()
}

fn spectrum_landmarks(runs: &[SpectrumRun; 3]) -> Outcome {
    let step = runs[0].deltas[1] - runs[0].deltas[0];
    let g = 20.0;
    let dips = local_minima(&runs[0]);
    let split_ok = dips.len() == 2 && (dips[0] + g).abs() <= step + 1e-9 && (dips[1] - g).abs() <= step + 1e-9;
    let outer = local_minima(&runs[1]);
    let splitting = outer.last().copied().unwrap_or(f64::NAN) - outer.first().copied().unwrap_or(f64::NAN);
    let expected = 2.0 * 2f64.sqrt() * g;
    let center = runs[1].deltas.iter().position(|d| d.abs() < 1e-12).expect("grid contains 0");
    let t0 = runs[1].t[center];
    let empty_dev = runs[2]
        .deltas
        .iter()
        .zip(&runs[2].t)
        .map(|(&d, &t)| (t - ((C64::new(0.0, d)) / C64::new(2.0, d)).norm_sqr()).abs())
        .fold(0.0, f64::max);
    let ok = split_ok && ((splitting - expected) / expected).abs() <= 0.02 && (t0 - 0.25).abs() <= 0.01 && empty_dev < 1e-6;
    outcome(
        ok,
        format!(
            "|alpha|^2=1 dips at {dips:?} (+-{step:.2}), |alpha|^2=1/2 outer splitting {splitting:.3} vs {expected:.3}, T(0) = {t0:.4}, |alpha|^2=0 max|T-T_empty| = {empty_dev:.1e}"
        ),
    )
}

fn chiral_calculus() -> Outcome {
    let mirror = beta_to_tr(&ChiralCoupling::two_level(0.5, 0.5)).unwrap();
    let absorber = beta_to_tr(&ChiralCoupling::two_level(0.5, 0.0)).unwrap();
    let none = beta_to_tr(&ChiralCoupling::two_level(0.0, 0.0)).unwrap();
    let endpoints = mirror.r_plus.powi(2) == 1.0
        && mirror.t_plus == 0.0
        && absorber.t_plus == 0.0
        && absorber.r_plus == 0.0
        && absorber.t_minus == 1.0
        && none.t_plus == 1.0
        && none.t_minus == 1.0
        && none.r_plus == 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut r = || 10f64.powf(rng.gen_range(-2.0..2.0));
        let (g, gamma, k0, kext) = (r(), r(), r(), r());
        let x = rng.gen_range(0.0..=1.0);
        let (tp, _) = resonator_transmission(g, gamma, k0, kext, 1.0 - x).unwrap();
        let (_, tm) = resonator_transmission(g, gamma, k0, kext, x).unwrap();
        worst = worst.max((tp - tm).abs());
    }
    outcome(endpoints && worst <= 1e-12, format!("regime endpoints exact: {endpoints}, mirror identity worst {worst:.1e} over 1000 points"))
}

fn resonator_anchors() -> Outcome {
    let (g, gamma, k0) = (mhz(20.0), mhz(3.0), mhz(5.0));
    let big_g = g * g / gamma;
    let (tp1, _) = resonator_transmission(g, gamma, k0, k0 + big_g, 1.0).unwrap();
    let ks = (k0 * (big_g + k0)).sqrt();
    let (th_p, th_m) = resonator_transmission(g, gamma, k0, ks, 0.5).unwrap();
    let mut empty = 0.0f64;
    for kext in [0.1, 1.0, 3.7, 40.0].map(|f| f * k0) {
        let (a, b) = resonator_transmission(0.0, gamma, k0, kext, 0.3).unwrap();
        let want = (k0 - kext) / (k0 + kext);
        empty = empty.max((a - want).abs()).max((b - want).abs());
    }
    let ok = tp1.abs() <= 1e-10 && th_p.abs() <= 1e-10 && th_m.abs() <= 1e-10 && empty <= 1e-10;
    outcome(ok, format!("t+(k0+G) = {tp1:.1e}, t(sqrt(k0(G+k0))) = ({th_p:.1e}, {th_m:.1e}), g=0 deviation {empty:.1e}"))
}

fn devices_criterion() -> Outcome {
    let (g, gamma, k0) = (mhz(20.0), mhz(3.0), mhz(5.0));
    // Diode, ideal and with the stretched-state strength ratio.
    let ideal = DiodeParams { g_ccw: g, g_cw: 0.0, gamma, kappa_0: k0, kappa_ext: k0 };
    let res = diode(&ideal, &[0.0]).unwrap();
    let gam = g * g / gamma;
    let t12_closed = ((gam + k0 - k0) / (gam + k0 + k0)).powi(2);
    let diode_ideal = res.t21[0] < 1e-12 && (res.t12[0] - t12_closed).abs() < 1e-12;
    let spec = AtomPreset::rb85_d2().to_spec().unwrap();
    let g_cw = cw_coupling_stretched(&spec, g, CwCouplingMode::DipoleRatio).unwrap();
    let iso = DiodeParams { g_ccw: g, g_cw, gamma, kappa_0: k0, kappa_ext: k0 }.isolation_db();
    let brute = |g2: f64| {
        let c = C64::new(g2 / gamma, 0.0);
        ((c + k0 - k0) / (c + k0 + k0)).norm_sqr()
    };
    let iso_ref = 10.0 * (brute(g * g) / brute(g * g / 28.0)).log10();
    let diode_ratio = (iso - iso_ref).abs() < 1e-10;
    // Circulator.
    let cp = CirculatorParams { g, g_weak: g_cw, gamma, kappa_0: k0, kappa_a: mhz(11.0), kappa_b: mhz(11.0) };
    let plus = circulator(&cp, Spin::Plus).unwrap();
    let minus = circulator(&cp, Spin::Minus).unwrap();
    let empty = circulator(&CirculatorParams { g: 0.0, g_weak: 0.0, ..cp }, Spin::Plus).unwrap();
    let mut transpose = true;
    let mut asym = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            transpose &= plus.matrix[i][j] == minus.matrix[j][i];
            asym = asym.max((empty.matrix[i][j] - empty.matrix[j][i]).abs());
        }
    }
    let opt = optimize_kappa(&Objective::CirculatorFidelity { g, g_weak: 0.0, gamma, kappa_0: k0, spin: Spin::Plus }, 0.1 * k0, 100.0 * k0).unwrap();
    let anchor = circulator(&CirculatorParams { g, g_weak: 0.0, gamma, kappa_0: k0, kappa_a: 1.7 * k0, kappa_b: 1.7 * k0 }, Spin::Plus).unwrap();
    // SPRINT.
    let ks = (k0 * (k0 + 2.0 * g * g / gamma)).sqrt();
    let s = sprint(g, gamma, k0, ks).unwrap();
    let sopt = optimize_kappa(&Objective::SprintEfficiency { g, gamma, kappa_0: k0 }, 0.1 * k0, 100.0 * k0).unwrap();
    let sprint_ok = s.t_interacting.abs() < 1e-10 && ((sopt.kappa - ks) / ks).abs() < 1e-4;
    let ok = diode_ideal && diode_ratio && transpose && asym <= 1e-12 && sprint_ok;
    outcome(
        ok,
        format!(
            "diode T21(0) = {:.1e}, isolation {iso:.4} dB (brute force {iso_ref:.4}); circulator transpose {transpose}, g=0 asymmetry {asym:.1e}, fidelity optimum at k_tot/2k0 = {:.2} (F = {:.3}), at 2.2: F = {:.3}; SPRINT t = {:.1e}, optimizer k* rel. error {:.1e}",
            res.t21[0],
            (k0 + 2.0 * opt.kappa) / (2.0 * k0),
            opt.value,
            anchor.fidelity,
            s.t_interacting,
            ((sopt.kappa - ks) / ks).abs()
        ),
    )
}

fn hygiene(reports: &[ModelReport], runs: &[SpectrumRun; 3]) -> Outcome {
    let mut trace = 0.0f64;
    let mut herm = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut top = 0.0f64;
    let mut lin = 0.0f64;
    for r in reports {
        trace = trace.max(r.max_trace_error());
        herm = herm.max(r.max_hermiticity_error());
        min_eig = min_eig.min(r.min_eigenvalue());
        top = top.max(r.max_top_shell());
        lin = lin.max(r.max_linearity());
    }
    for run in runs {
        for s in &run.states {
            trace = trace.max(s.diagnostics.trace_error);
            herm = herm.max(s.diagnostics.hermiticity_error);
            min_eig = min_eig.min(s.diagnostics.min_eigenvalue);
            top = top.max(s.top_shell_population);
        }
    }
    let atoms = [AtomOperators::v_system(1.0), AtomOperators::v_system(1.0), AtomOperators::two_level_sigma_plus(1.0)];
    for ((atom, x), run) in atoms.iter().zip([1.0, 0.5, 0.0]).zip(runs) {
        for &d in run.deltas.iter().step_by(40) {
            let p = SystemParams { delta_ap: d, delta_rp: d, ..fig4_params(x) };
            lin = lin.max(drive_linearity(atom, &p, ProbeDirection::Forward, &ProbeOptions::default()).unwrap());
        }
    }
    let ok = trace <= 1e-9 && herm <= 1e-10 && min_eig >= -1e-8 && top < TRUNCATION_THRESHOLD && lin < LINEARITY_TOL;
    outcome(ok, format!("trace {trace:.1e}, hermiticity {herm:.1e}, min eigenvalue {min_eig:.1e}, top shell {top:.1e}, linearity {lin:.1e}"))
}

fn special_functions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst, mut skipped) = (0.0f64, 0);
    for _ in 0..5000 {
        let m = rng.gen_range(0..=500u32);
        let x = (rng.gen_range(0.0..(1e4f64).ln())).exp();
        match bessel_jy(m, x) {
            Ok(p) => worst = worst.max(((p.j * p.y_prime - p.j_prime * p.y) * PI * x / 2.0 - 1.0).abs()),
            Err(_) => skipped += 1,
        }
    }
    let mut oracle = CgOracle::new();
    let mut w3 = 0.0f64;
    let mut w6 = 0.0f64;
    let h = HalfInt::from_twice;
    for a in 0..=8 {
        for b in 0..=8 {
            for c in 0..=8 {
                if !triangle(a, b, c) {
                    continue;
                }
                for ma in (-a..=a).step_by(2) {
                    for mb in (-b..=b).step_by(2) {
                        let mc = -ma - mb;
                        if mc.abs() > c {
                            continue;
                        }
                        w3 = w3.max((wigner_3j(h(a), h(b), h(c), h(ma), h(mb), h(mc)) - oracle.three_j([a, b, c, ma, mb, mc])).abs());
                    }
                }
                for d in 0..=8 {
                    for e in 0..=8 {
                        for f in 0..=8 {
                            if triangle(d, e, c) && triangle(a, e, f) && triangle(d, b, f) {
                                w6 = w6.max((wigner_6j(h(a), h(b), h(c), h(d), h(e), h(f)) - oracle.six_j([a, b, c, d, e, f])).abs());
                            }
                        }
                    }
                }
            }
        }
    }
    let table = dipole_table(&AtomPreset::rb85_d2().to_spec().unwrap());
    let m3 = HalfInt::integer(3);
    let ratio = (table.mu(m3, 1) / table.mu(m3, -1)).powi(2);
    let ok = worst < 1e-10 && w3 < 1e-12 && w6 < 1e-12 && ((ratio - 28.0) / 28.0).abs() < 1e-9;
    outcome(ok, format!("Wronskian worst {worst:.1e} ({skipped} of 5000 draws outside f64 range), 3j {w3:.1e}, 6j {w6:.1e}, Rb85 ratio {ratio:.12}"))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "WGM polarization anchors", wgm_anchors()));
    results.push((2, "resonance roots", resonance_roots()));
    let (reports, elapsed) = oracle_reports();
    results.push((3, "master equation vs closed forms", oracle_equivalence_criterion(&reports, elapsed)));
    let runs = [
        forward_spectrum(&AtomOperators::v_system(1.0), &fig4_params(1.0)),
        forward_spectrum(&AtomOperators::v_system(1.0), &fig4_params(0.5)),
        forward_spectrum(&AtomOperators::two_level_sigma_plus(1.0), &fig4_params(0.0)),
    ];
    results.push((4, "spectrum landmarks", spectrum_landmarks(&runs)));
    results.push((5, "chiral waveguide calculus", chiral_calculus()));
    results.push((6, "resonator-enhanced anchors", resonator_anchors()));
    results.push((7, "devices", devices_criterion()));
    results.push((8, "master equation hygiene", hygiene(&reports, &runs)));
    results.push((9, "special functions", special_functions()));
    let mut failed = 0;
    for (n, name, o) in &results {
        println!("[{}] criterion {n} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed ({:.1} s)", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
