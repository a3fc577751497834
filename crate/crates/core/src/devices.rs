//! Device figures of merit built on the closed forms: optical diode, four-port circulator and
//! single-photon Raman switching (SPRINT) amplitudes, plus a κ optimizer over them.

use serde::{Deserialize, Serialize};

use crate::atom::{dipole_table, AtomSpec};
use crate::error::{Error, Result};
use crate::lindblad::ProbeDirection;
use crate::specfun::HalfInt;
use crate::C64;

fn check_non_negative(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::Domain(format!("{name} = {v} must be finite and non-negative")));
        }
    }
    Ok(())
}

/// Atom-induced resonator loss Γ = g²/(γ + iΔ).
pub fn atom_loss_rate(g: f64, gamma: f64, delta: f64) -> C64 {
    if g == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::new(g * g, 0.0) / C64::new(gamma, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeParams {
    pub g_ccw: f64,
    pub g_cw: f64,
    pub gamma: f64,
    pub kappa_0: f64,
    pub kappa_ext: f64,
}

impl DiodeParams {
    pub fn validate(&self) -> Result<()> {
        check_non_negative(&[("g_ccw", self.g_ccw), ("g_cw", self.g_cw), ("gamma", self.gamma), ("kappa_0", self.kappa_0), ("kappa_ext", self.kappa_ext)])?;
        if self.gamma == 0.0 && (self.g_ccw > 0.0 || self.g_cw > 0.0) {
            return Err(Error::Domain("gamma must be positive for a coupled atom".into()));
        }
        Ok(())
    }

    /// T = |(Γ + κ_0 − κ_ext + iΔ)/(Γ + κ_0 + κ_ext + iΔ)|² for one circulation sense.
    pub fn transmission(&self, g: f64, delta: f64) -> f64 {
        let big_g = atom_loss_rate(g, self.gamma, delta);
        let num = big_g + C64::new(self.kappa_0 - self.kappa_ext, delta);
        let den = big_g + C64::new(self.kappa_0 + self.kappa_ext, delta);
        (num / den).norm_sqr()
    }

    /// 10·log10(T12/T21) on resonance; +∞ when T21 vanishes.
    pub fn isolation_db(&self) -> f64 {
        let (t12, t21) = (self.transmission(self.g_ccw, 0.0), self.transmission(self.g_cw, 0.0));
        if t21 == 0.0 {
            if t12 == 0.0 { f64::NAN } else { f64::INFINITY }
        } else {
            10.0 * (t12 / t21).log10()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiodeResult {
    pub params: DiodeParams,
    pub deltas: Vec<f64>,
    pub t12: Vec<f64>,
    pub t21: Vec<f64>,
    pub isolation_db: f64,
}

impl DiodeResult {
    pub const HEADER: [&'static str; 3] = ["delta", "T12", "T21"];
}

/// Forward (port 1 → 2, CCW mode) and backward transmission spectra and on-resonance isolation.
pub fn diode(params: &DiodeParams, deltas: &[f64]) -> Result<DiodeResult> {
    params.validate()?;
    Ok(DiodeResult {
        params: *params,
        deltas: deltas.to_vec(),
        t12: deltas.iter().map(|&d| params.transmission(params.g_ccw, d)).collect(),
        t21: deltas.iter().map(|&d| params.transmission(params.g_cw, d)).collect(),
        isolation_db: params.isolation_db(),
    })
}

/// Ground-state spin of the atom. `Plus` couples the CCW mode strongly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    /// Intended output port (0-based) for each input port.
    pub fn targets(&self) -> [usize; 4] {
        match self {
            Spin::Plus => [1, 2, 3, 0],
            Spin::Minus => [3, 0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculatorParams {
    /// Coupling of the strongly coupled circulation sense.
    pub g: f64,
    /// Coupling of the weakly coupled sense.
    #[serde(default)]
    pub g_weak: f64,
    pub gamma: f64,
    pub kappa_0: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirculatorResult {
    pub spin: Spin,
    /// Power transmission, `matrix[from][to]` with ports 1..4 at indices 0..3.
    pub matrix: [[f64; 4]; 4],
    pub fidelity: f64,
    pub insertion_loss_db: f64,
}

impl CirculatorResult {
    pub fn row_sum(&self, from: usize) -> f64 {
        self.matrix[from].iter().sum()
    }
}

/// On-resonance 4×4 port transmission. Ports 1 and 2 sit on waveguide A, 3 and 4 on waveguide B;
/// light entering at 1 or 3 excites the CCW mode. Fidelity is the mean over input ports of the
/// target-port share of the output power.
pub fn circulator(params: &CirculatorParams, spin: Spin) -> Result<CirculatorResult> {
    let p = params;
    check_non_negative(&[("g", p.g), ("g_weak", p.g_weak), ("gamma", p.gamma), ("kappa_0", p.kappa_0), ("kappa_A", p.kappa_a), ("kappa_B", p.kappa_b)])?;
    if p.gamma == 0.0 || p.kappa_0 + p.kappa_a + p.kappa_b == 0.0 {
        return Err(Error::Domain("need gamma > 0 and a non-zero total resonator loss".into()));
    }
    let strong = p.g * p.g / p.gamma;
    let weak = p.g_weak * p.g_weak / p.gamma;
    let (ccw, cw) = match spin {
        Spin::Plus => (strong, weak),
        Spin::Minus => (weak, strong),
    };
    let (k0, ka, kb) = (p.kappa_0, p.kappa_a, p.kappa_b);
    let through = |gam: f64, own: f64, other: f64| ((gam + k0 + other - own) / (gam + k0 + ka + kb)).powi(2);
    let drop = |gam: f64| 4.0 * ka * kb / (gam + k0 + ka + kb).powi(2);
    let mut m = [[0.0; 4]; 4];
    m[0][1] = through(ccw, ka, kb);
    m[1][0] = through(cw, ka, kb);
    m[2][3] = through(ccw, kb, ka);
    m[3][2] = through(cw, kb, ka);
    m[0][3] = drop(ccw);
    m[2][1] = drop(ccw);
    m[3][0] = drop(cw);
    m[1][2] = drop(cw);
    let targets = spin.targets();
    let mut fidelity = 0.0;
    let mut transmitted = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let sum: f64 = m[i].iter().sum();
        fidelity += if sum > 0.0 { m[i][t] / sum } else { 0.0 };
        transmitted += m[i][t];
    }
    Ok(CirculatorResult { spin, matrix: m, fidelity: fidelity / 4.0, insertion_loss_db: -10.0 * (transmitted / 4.0).log10() })
}

/// Initial Zeeman ground state of the Λ-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroundState {
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "+1")]
    PlusOne,
}

/// SPRINT amplitudes on resonance. The interacting combinations are (+, m = −1) and (−, m = +1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SprintResult {
    pub t_interacting: f64,
    pub r_interacting: f64,
    pub t_passive: f64,
    pub r_passive: f64,
}

impl SprintResult {
    pub fn amplitudes(&self, direction: ProbeDirection, state: GroundState) -> (f64, f64) {
        match (direction, state) {
            (ProbeDirection::Forward, GroundState::MinusOne) | (ProbeDirection::Backward, GroundState::PlusOne) => {
                (self.t_interacting, self.r_interacting)
            }
            _ => (self.t_passive, self.r_passive),
        }
    }
}

/// Λ-system with equal transitions, each coupled to one circulation sense with strength g.
/// With G = g²/γ and κ = κ_0 + κ_ext:
/// t = (κ_0 − κ_ext + 2Gκ_0/κ)/(κ_0 + 2G + κ_ext), r = (2Gκ_ext/κ)/(κ_0 + 2G + κ_ext)
/// for the interacting case, and the empty-resonator t with r = 0 otherwise.
pub fn sprint(g: f64, gamma: f64, kappa_0: f64, kappa_ext: f64) -> Result<SprintResult> {
    check_non_negative(&[("g", g), ("gamma", gamma), ("kappa_0", kappa_0), ("kappa_ext", kappa_ext)])?;
    let k = kappa_0 + kappa_ext;
    if gamma == 0.0 || k == 0.0 {
        return Err(Error::Domain("need gamma > 0 and kappa_0 + kappa_ext > 0".into()));
    }
    let g2 = 2.0 * g * g / gamma;
    let den = kappa_0 + g2 + kappa_ext;
    Ok(SprintResult {
        t_interacting: (kappa_0 - kappa_ext + g2 * kappa_0 / k) / den,
        r_interacting: g2 * kappa_ext / k / den,
        t_passive: (kappa_0 - kappa_ext) / k,
        r_passive: 0.0,
    })
}

/// Critical coupling of the interacting SPRINT channel, √(κ_0(κ_0 + 2g²/γ)).
pub fn sprint_critical_kappa(g: f64, gamma: f64, kappa_0: f64) -> f64 {
    (kappa_0 * (kappa_0 + 2.0 * g * g / gamma)).sqrt()
}

/// Figure of merit maximised by [`optimize_kappa`]. The swept κ is κ_ext for the diode and
/// SPRINT and κ_A = κ_B for the circulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "snake_case")]
pub enum Objective {
    Isolation { g_ccw: f64, g_cw: f64, gamma: f64, kappa_0: f64 },
    CirculatorFidelity { g: f64, g_weak: f64, gamma: f64, kappa_0: f64, spin: Spin },
    SprintEfficiency { g: f64, gamma: f64, kappa_0: f64 },
}

impl Objective {
    pub fn evaluate(&self, kappa: f64) -> Result<f64> {
        match *self {
            Objective::Isolation { g_ccw, g_cw, gamma, kappa_0 } => {
                let p = DiodeParams { g_ccw, g_cw, gamma, kappa_0, kappa_ext: kappa };
                p.validate()?;
                Ok(p.isolation_db())
            }
            Objective::CirculatorFidelity { g, g_weak, gamma, kappa_0, spin } => {
                Ok(circulator(&CirculatorParams { g, g_weak, gamma, kappa_0, kappa_a: kappa, kappa_b: kappa }, spin)?.fidelity)
            }
            Objective::SprintEfficiency { g, gamma, kappa_0 } => Ok(sprint(g, gamma, kappa_0, kappa)?.r_interacting.powi(2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaOptimum {
    pub kappa: f64,
    pub value: f64,
    /// False when the grid pre-scan found several local maxima; the refinement is then local to
    /// the grid argmax.
    pub unimodal: bool,
}

const GRID_POINTS: usize = 401;

/// Maximises the objective over κ in [lo, hi] with a logarithmic pre-scan followed by
/// golden-section refinement in ln κ between the neighbours of the grid argmax. The result is
/// never worse than the best grid point.
pub fn optimize_kappa(objective: &Objective, lo: f64, hi: f64) -> Result<KappaOptimum> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("kappa range [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = (ln_hi - ln_lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|k| ln_lo + step * k as f64).collect();
    let values = grid.iter().map(|&u| objective.evaluate(u.exp())).collect::<Result<Vec<_>>>()?;
    let score = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    let best = (0..GRID_POINTS).max_by(|&a, &b| score(values[a]).total_cmp(&score(values[b]))).expect("non-empty grid");
    if values[best] == f64::INFINITY {
        return Ok(KappaOptimum { kappa: grid[best].exp(), value: f64::INFINITY, unimodal: true });
    }
    let unimodal = is_unimodal(&values);
    if !unimodal {
        log::warn!("objective is not unimodal on the kappa grid, refining only around the grid argmax");
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(GRID_POINTS - 1)];
    let f = |u: f64| objective.evaluate(u.exp()).map(score);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-10 {
        if fc == f64::INFINITY || fd == f64::INFINITY {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (u, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    let (u, v) = if v >= score(values[best]) { (u, v) } else { (grid[best], values[best]) };
    Ok(KappaOptimum { kappa: u.exp(), value: v, unimodal })
}

/// Rises then falls, ignoring relative wiggles below 1e-12.
fn is_unimodal(values: &[f64]) -> bool {
    let scale = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut descending = false;
    for w in values.windows(2) {
        let diff = w[1] - w[0];
        if diff.is_nan() {
            return false;
        }
        if diff < -1e-12 * scale {
            descending = true;
        } else if diff > 1e-12 * scale && descending {
            return false;
        }
    }
    true
}

/// How the weakly coupled circulation sense inherits its coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CwCouplingMode {
    /// g_cw = g·|μ_weak/μ_strong|.
    DipoleRatio,
    /// g_cw² = g²(|α_σ−|²μ_strong² + |α_σ+|²μ_weak²)/μ_strong².
    WithMixing { alpha_sp_sq: f64 },
}

/// Weak-sense coupling from the strong one and two transition strengths.
pub fn cw_coupling(g_strong: f64, mu_strong: f64, mu_weak: f64, mode: CwCouplingMode) -> Result<f64> {
    if mu_strong == 0.0 {
        return Err(Error::Domain("strong transition has zero dipole strength".into()));
    }
    let (s2, w2) = (mu_strong * mu_strong, mu_weak * mu_weak);
    match mode {
        CwCouplingMode::DipoleRatio => Ok(g_strong * (w2 / s2).sqrt()),
        CwCouplingMode::WithMixing { alpha_sp_sq } => {
            if !(0.0..=1.0).contains(&alpha_sp_sq) {
                return Err(Error::Domain(format!("|alpha_sigma+|^2 = {alpha_sp_sq} outside [0, 1]")));
            }
            Ok(g_strong * (((1.0 - alpha_sp_sq) * s2 + alpha_sp_sq * w2) / s2).sqrt())
        }
    }
}

/// Weak-sense coupling for an atom in the stretched state m_F = +F: the strong transition is σ+
/// and the weak one σ− from the same ground sublevel.
pub fn cw_coupling_stretched(spec: &AtomSpec, g_strong: f64, mode: CwCouplingMode) -> Result<f64> {
    spec.validate()?;
    let table = dipole_table(spec);
    let m: HalfInt = spec.f;
    cw_coupling(g_strong, table.mu(m, 1), table.mu(m, -1), mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::AtomPreset;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn diode_limits() {
        let sym = DiodeParams { g_ccw: 3.0, g_cw: 3.0, gamma: 1.0, kappa_0: 1.0, kappa_ext: 2.0 };
        assert_eq!(sym.isolation_db(), 0.0);
        let ideal = DiodeParams { g_ccw: 3.0, g_cw: 0.0, gamma: 1.0, kappa_0: 1.0, kappa_ext: 1.0 };
        assert_eq!(ideal.isolation_db(), f64::INFINITY);
        let res = diode(&ideal, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(res.t21[1], 0.0);
        assert!(res.t12.iter().chain(&res.t21).all(|t| (0.0..=1.0).contains(t)));
        assert!(diode(&DiodeParams { kappa_0: -1.0, ..ideal }, &[0.0]).is_err());
    }

    #[test]
    fn diode_rb85_finite_isolation() {
        let g = TAU * 20e6;
        let p = DiodeParams { g_ccw: g, g_cw: g / 28f64.sqrt(), gamma: TAU * 3e6, kappa_0: TAU * 5e6, kappa_ext: TAU * 5e6 };
        let iso = p.isolation_db();
        // In 2π·MHz: Γ = g²/γ and T = (Γ/(Γ + 10))² at critical coupling.
        let (gs, gw): (f64, f64) = (400.0 / 3.0, 400.0 / 28.0 / 3.0);
        let expect = 10.0 * ((gs / (gs + 10.0)).powi(2) / (gw / (gw + 10.0)).powi(2)).log10();
        assert!((iso - expect).abs() < 1e-10, "{iso} vs {expect}");
    }

    #[test]
    fn empty_circulator_reciprocal_add_drop() {
        let p = CirculatorParams { g: 0.0, g_weak: 0.0, gamma: 1.0, kappa_0: 1.0, kappa_a: 200.0, kappa_b: 200.0 };
        let res = circulator(&p, Spin::Plus).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(res.matrix[i][j], res.matrix[j][i]);
            }
        }
        for (i, j) in [(0, 3), (1, 2), (2, 1), (3, 0)] {
            assert!(res.matrix[i][j] > 0.99);
        }
    }

    #[test]
    fn circulator_spin_flip_transposes() {
        let p = CirculatorParams { g: 4.0, g_weak: 0.5, gamma: 1.0, kappa_0: 1.0, kappa_a: 3.0, kappa_b: 2.0 };
        let plus = circulator(&p, Spin::Plus).unwrap();
        let minus = circulator(&p, Spin::Minus).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((plus.matrix[i][j] - minus.matrix[j][i]).abs() < 1e-15);
            }
            assert!(plus.row_sum(i) <= 1.0 + 1e-12);
        }
        assert!((plus.fidelity - minus.fidelity).abs() < 1e-12);
        assert!(plus.matrix[0][1] != plus.matrix[1][0]);
    }

    #[test]
    fn sprint_anchors() {
        let (g, gamma, k0) = (2.0, 1.0, 0.5);
        let kc = sprint_critical_kappa(g, gamma, k0);
        let s = sprint(g, gamma, k0, kc).unwrap();
        assert!(s.t_interacting.abs() < 1e-15);
        assert_eq!(s.amplitudes(ProbeDirection::Forward, GroundState::PlusOne), ((k0 - kc) / (k0 + kc), 0.0));
        let tiny = sprint(g, gamma, 1e-9, sprint_critical_kappa(g, gamma, 1e-9)).unwrap();
        assert!((tiny.r_interacting - 1.0).abs() < 1e-4);
        for kext in [0.01, 0.3, 1.0, 10.0] {
            let s = sprint(g, gamma, k0, kext).unwrap();
            assert!(s.t_interacting.powi(2) + s.r_interacting.powi(2) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn optimizer_finds_sprint_and_isolation_points() {
        let (g, gamma, k0) = (3.0, 1.0, 0.7);
        let opt = optimize_kappa(&Objective::SprintEfficiency { g, gamma, kappa_0: k0 }, 1e-2, 1e3).unwrap();
        let kc = sprint_critical_kappa(g, gamma, k0);
        assert!(opt.unimodal && ((opt.kappa - kc) / kc).abs() < 1e-4);
        let iso = optimize_kappa(&Objective::Isolation { g_ccw: g, g_cw: 0.0, gamma, kappa_0: k0 }, 1e-2, 1e2).unwrap();
        assert!(!iso.unimodal && ((iso.kappa - k0) / k0).abs() < 1e-4, "{iso:?}");
    }

    #[test]
    fn unimodality_detection() {
        assert!(is_unimodal(&[0.0, 1.0, 2.0, 1.0, 0.0]));
        assert!(!is_unimodal(&[0.0, 2.0, 1.0, 2.0, 0.0]));
        assert!(optimize_kappa(&Objective::SprintEfficiency { g: 1.0, gamma: 1.0, kappa_0: 1.0 }, 2.0, 1.0).is_err());
    }

    #[test]
    fn cw_coupling_modes() {
        let spec = AtomPreset::rb85_d2().to_spec().unwrap();
        let g = cw_coupling_stretched(&spec, 28f64.sqrt(), CwCouplingMode::DipoleRatio).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        let mixed = cw_coupling(1.0, 1.0, 0.0, CwCouplingMode::WithMixing { alpha_sp_sq: 0.97 }).unwrap();
        assert!((mixed - 0.03f64.sqrt()).abs() < 1e-15);
        assert!(cw_coupling(1.0, 0.0, 1.0, CwCouplingMode::DipoleRatio).is_err());
    }
}
