//! Hyperfine level schemes, dipole strengths, lowering operators and Zeeman shifts for a single
//! F → F' transition. The quantization axis is the resonator symmetry axis z.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::specfun::{wigner_3j, wigner_6j, HalfInt};
use crate::units::{mhz_to_rad, MU_B_OVER_HBAR};
use crate::C64;

/// Quantum numbers, Landé factors and field decay rate γ (rad/s) of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub f: HalfInt,
    pub f_prime: HalfInt,
    pub j: HalfInt,
    pub j_prime: HalfInt,
    pub i: HalfInt,
    pub g_f: f64,
    pub g_f_prime: f64,
    pub gamma: f64,
}

fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

impl AtomSpec {
    /// F = 0 → F' = 1 (J = 0 → J' = 1, I = 0).
    pub fn v_system(gamma: f64) -> Self {
        AtomSpec {
            f: HalfInt::ZERO,
            f_prime: HalfInt::ONE,
            j: HalfInt::ZERO,
            j_prime: HalfInt::ONE,
            i: HalfInt::ZERO,
            g_f: 0.0,
            g_f_prime: 1.0,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.f, self.f_prime, self.j, self.j_prime, self.i];
        if all.iter().any(|x| x.twice() < 0) {
            return Err(Error::InvalidAngularMomenta("negative angular momentum".into()));
        }
        if (self.f.twice() - self.f_prime.twice()).abs() > 2 {
            return Err(Error::InvalidAngularMomenta(format!("|F - F'| > 1 for F = {}, F' = {}", self.f, self.f_prime)));
        }
        if (self.f == HalfInt::ZERO) && (self.f_prime == HalfInt::ZERO) {
            return Err(Error::InvalidAngularMomenta("F = 0 → F' = 0 is dipole forbidden".into()));
        }
        if !triangle(self.j, self.i, self.f) {
            return Err(Error::InvalidAngularMomenta(format!("(J, I, F) = ({}, {}, {}) violates the triangle rule", self.j, self.i, self.f)));
        }
        if !triangle(self.j_prime, self.i, self.f_prime) {
            return Err(Error::InvalidAngularMomenta(format!(
                "(J', I, F') = ({}, {}, {}) violates the triangle rule",
                self.j_prime, self.i, self.f_prime
            )));
        }
        if !triangle(self.j, self.j_prime, HalfInt::ONE) {
            return Err(Error::InvalidAngularMomenta(format!("J = {} → J' = {} is not a dipole transition", self.j, self.j_prime)));
        }
        if !(self.gamma >= 0.0) || !self.g_f.is_finite() || !self.g_f_prime.is_finite() {
            return Err(Error::Domain("decay rate must be non-negative and Landé factors finite".into()));
        }
        Ok(())
    }
}

/// JSON preset with rates in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomPreset {
    pub name: String,
    #[serde(rename = "F")]
    pub f: HalfInt,
    #[serde(rename = "Fp")]
    pub f_prime: HalfInt,
    #[serde(rename = "J")]
    pub j: HalfInt,
    #[serde(rename = "Jp")]
    pub j_prime: HalfInt,
    #[serde(rename = "I")]
    pub i: HalfInt,
    #[serde(rename = "gF")]
    pub g_f: f64,
    #[serde(rename = "gFp")]
    pub g_f_prime: f64,
    #[serde(rename = "gamma_MHz")]
    pub gamma_mhz: f64,
}

impl AtomPreset {
    /// ⁸⁵Rb D2 line, F = 3 → F' = 4. Landé factors are the standard values 1/3 and 1/2.
    pub fn rb85_d2() -> Self {
        serde_json::from_str(include_str!("../presets/rb85_d2_f3_f4.json")).expect("built-in preset")
    }

    pub fn to_spec(&self) -> Result<AtomSpec> {
        let spec = AtomSpec {
            f: self.f,
            f_prime: self.f_prime,
            j: self.j,
            j_prime: self.j_prime,
            i: self.i,
            g_f: self.g_f,
            g_f_prime: self.g_f_prime,
            gamma: mhz_to_rad(self.gamma_mhz),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A Zeeman sublevel |F, m_F⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sublevel {
    pub f: HalfInt,
    pub m: HalfInt,
}

/// Zeeman manifolds of ground and excited hyperfine levels, ground states first.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    pub ground: Vec<Sublevel>,
    pub excited: Vec<Sublevel>,
}

impl LevelScheme {
    pub fn dim(&self) -> usize {
        self.ground.len() + self.excited.len()
    }

    pub fn ground_index(&self, m: HalfInt) -> Option<usize> {
        self.ground.iter().position(|s| s.m == m)
    }

    pub fn excited_index(&self, m: HalfInt) -> Option<usize> {
        self.excited.iter().position(|s| s.m == m).map(|k| k + self.ground.len())
    }

    pub fn is_excited(&self, index: usize) -> bool {
        index >= self.ground.len()
    }

    pub fn level(&self, index: usize) -> Sublevel {
        if index < self.ground.len() {
            self.ground[index]
        } else {
            self.excited[index - self.ground.len()]
        }
    }
}

pub fn build_scheme(spec: &AtomSpec) -> Result<LevelScheme> {
    spec.validate()?;
    let manifold = |f: HalfInt| f.projections().map(|m| Sublevel { f, m }).collect::<Vec<_>>();
    Ok(LevelScheme { ground: manifold(spec.f), excited: manifold(spec.f_prime) })
}

/// Relative dipole strengths μ_{m_F}^{m_F + q}, including the √((2J'+1)/(2J+1)) factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleTable {
    pub f: HalfInt,
    pub f_prime: HalfInt,
    /// Rows follow the ground manifold m_F = -F..F; columns are q = -1, 0, +1.
    pub values: Vec<[f64; 3]>,
}

impl DipoleTable {
    /// μ from ground m_F to excited m_F + q (zero outside the manifolds).
    pub fn mu(&self, m_f: HalfInt, q: i32) -> f64 {
        if !(-1..=1).contains(&q) || m_f.twice().abs() > self.f.twice() || (m_f.twice() + self.f.twice()) % 2 != 0 {
            return 0.0;
        }
        let row = ((m_f.twice() + self.f.twice()) / 2) as usize;
        self.values[row][(q + 1) as usize]
    }
}

pub fn dipole_table(spec: &AtomSpec) -> DipoleTable {
    let (f, fp, j, jp, i) = (spec.f, spec.f_prime, spec.j, spec.j_prime, spec.i);
    let mult = |x: HalfInt| (x.twice() + 1) as f64;
    let prefactor = (mult(fp) * mult(f) * mult(j)).sqrt() * (mult(jp) / mult(j)).sqrt();
    let six_j = wigner_6j(j, jp, HalfInt::ONE, fp, f, i);
    let values = f
        .projections()
        .map(|m| {
            let mut row = [0.0; 3];
            for (k, q) in (-1..=1).enumerate() {
                let mp = m + HalfInt::integer(q);
                if mp.twice().abs() <= fp.twice() {
                    row[k] = prefactor * wigner_3j(fp, HalfInt::ONE, f, mp, m - mp, -m) * six_j;
                }
            }
            row
        })
        .collect();
    DipoleTable { f, f_prime: fp, values }
}

/// Lowering operators [d_{-1}, d_0, d_{+1}] with d_q = Σ μ_{m}^{m+q} |F m⟩⟨F' m+q|.
pub fn lowering_ops(scheme: &LevelScheme, table: &DipoleTable) -> [SparseMatrix; 3] {
    let n = scheme.dim();
    [-1, 0, 1].map(|q| {
        let triplets = scheme.ground.iter().enumerate().filter_map(|(gi, g)| {
            let e = scheme.excited_index(g.m + HalfInt::integer(q))?;
            Some((gi, e, C64::new(table.mu(g.m, q), 0.0)))
        });
        SparseMatrix::from_triplets(n, n, triplets)
    })
}

/// μ_B g m_F B for every state, in rad/s (excited states use g_F').
pub fn zeeman_shifts(scheme: &LevelScheme, spec: &AtomSpec, b_tesla: f64) -> Vec<f64> {
    (0..scheme.dim())
        .map(|k| {
            let g = if scheme.is_excited(k) { spec.g_f_prime } else { spec.g_f };
            MU_B_OVER_HBAR * g * scheme.level(k).m.value() * b_tesla
        })
        .collect()
}

/// Orientation of a linear dipole in the symmetry plane, as spherical components [c_{-1}, c_0, c_{+1}].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearDipole {
    Radial,
    Azimuthal,
    Custom([C64; 3]),
}

impl LinearDipole {
    pub fn components(&self) -> [C64; 3] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            LinearDipole::Radial => [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
            LinearDipole::Azimuthal => [C64::new(0.0, -s), C64::new(0.0, 0.0), C64::new(0.0, s)],
            LinearDipole::Custom(c) => *c,
        }
    }
}

/// A spontaneous-decay channel |ground⟩⟨excited| with amplitude weight μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannel {
    pub ground: usize,
    pub excited: usize,
    pub weight: f64,
}

/// Everything the master-equation builder needs from the atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomOperators {
    pub label: String,
    pub dim: usize,
    pub excited: Vec<bool>,
    /// g·m per state; multiplied by μ_B B in the Hamiltonian.
    pub zeeman_coefficients: Vec<f64>,
    /// [d_{-1}, d_0, d_{+1}].
    pub lowering: [SparseMatrix; 3],
    pub decay: Vec<DecayChannel>,
    /// Atomic field decay rate γ (rad/s).
    pub gamma: f64,
}

impl AtomOperators {
    pub fn from_spec(spec: &AtomSpec) -> Result<Self> {
        let scheme = build_scheme(spec)?;
        let table = dipole_table(spec);
        let lowering = lowering_ops(&scheme, &table);
        let mut decay = Vec::new();
        for (gi, g) in scheme.ground.iter().enumerate() {
            for q in -1..=1 {
                if let Some(e) = scheme.excited_index(g.m + HalfInt::integer(q)) {
                    let w = table.mu(g.m, q);
                    if w != 0.0 {
                        decay.push(DecayChannel { ground: gi, excited: e, weight: w });
                    }
                }
            }
        }
        let zeeman = zeeman_shifts(&scheme, spec, 1.0).iter().map(|w| w / MU_B_OVER_HBAR).collect();
        Ok(AtomOperators {
            label: format!("F={} -> F'={}", spec.f, spec.f_prime),
            dim: scheme.dim(),
            excited: (0..scheme.dim()).map(|k| scheme.is_excited(k)).collect(),
            zeeman_coefficients: zeeman,
            lowering,
            decay,
            gamma: spec.gamma,
        })
    }

    pub fn v_system(gamma: f64) -> Self {
        let mut ops = Self::from_spec(&AtomSpec::v_system(gamma)).expect("valid V-system");
        ops.label = "v_system".into();
        ops
    }

    fn two_level(label: &str, c: [C64; 3], gamma: f64) -> Self {
        let lowering = c.map(|cq| SparseMatrix::from_triplets(2, 2, [(0, 1, cq)]));
        AtomOperators {
            label: label.into(),
            dim: 2,
            excited: vec![false, true],
            zeeman_coefficients: vec![0.0, 0.0],
            lowering,
            decay: vec![DecayChannel { ground: 0, excited: 1, weight: 1.0 }],
            gamma,
        }
    }

    /// Two-level atom driven only by σ+ light.
    pub fn two_level_sigma_plus(gamma: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self::two_level("two_level_sigma_plus", [z, z, C64::new(1.0, 0.0)], gamma)
    }

    /// Two-level atom with a linear dipole, d_q = c_q σ.
    pub fn linear_two_level(dipole: LinearDipole, gamma: f64) -> Self {
        Self::two_level("linear_two_level", dipole.components(), gamma)
    }

    /// d_mode = Σ_q overlap_q d_q.
    pub fn mode_lowering(&self, overlaps: &crate::polarization::PolarizationOverlaps) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(self.dim, self.dim);
        for (k, q) in (-1..=1).enumerate() {
            let c = overlaps.component(q);
            if c != C64::new(0.0, 0.0) {
                acc = acc.add(&self.lowering[k].scale(c)).expect("same shape");
            }
        }
        acc
    }
}
