//! Whispering-gallery modes of a dielectric cylinder.
//!
//! A mode is generated by one scalar potential ψ(r): H_z for TM and E_z for TE, with
//! ψ = A·J_m(n0 k r) inside and ψ = A·J_m(n0 k R)·Y_m(k r)/Y_m(k R) outside.
//! Counter-clockwise fields carry exp(i(ωt − mφ)); the TM components are
//! E_r = m ψ / (n² k r) and E_φ = −i ψ' / (n² k).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::{ModeOverlaps, PolarizationOverlaps};
use crate::specfun::{bessel_j_with_derivative, bessel_y_log, YLog};
use crate::C64;

/// Offset of the evanescent surface point, r = R(1 + SURFACE_OFFSET).
pub const SURFACE_OFFSET: f64 = 1e-6;
/// Uniform steps in the root scan.
pub const SCAN_STEPS: usize = 2000;
const WINDOW: (f64, f64) = (0.7, 1.3);
const WIDE_WINDOW: (f64, f64) = (0.5, 2.5);
const NORMALIZATION_SAMPLES: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TM,
    TE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ccw,
    Cw,
}

/// Resonator geometry and mode labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub n0: f64,
    /// Radius in meters.
    pub radius: f64,
    pub m: u32,
    pub p: u32,
    pub polarization: Polarization,
}

impl ModeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.n0 > 1.0) || !self.n0.is_finite() {
            return Err(Error::Domain(format!("refractive index {} must exceed 1", self.n0)));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!("radius {} must be positive", self.radius)));
        }
        if self.m == 0 {
            return Err(Error::Domain("azimuthal number m must be at least 1".into()));
        }
        Ok(())
    }

    /// Matching prefactor: 1/n0 for TM, n0 for TE.
    pub fn matching_factor(&self) -> f64 {
        match self.polarization {
            Polarization::TM => 1.0 / self.n0,
            Polarization::TE => self.n0,
        }
    }
}

/// A resolved resonance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub spec: ModeSpec,
    /// Vacuum wavenumber k of the resonance (1/m).
    pub k_phi_r: f64,
    /// Geometric dispersion factor k n0 R / m.
    pub f_p_m: f64,
    /// Interior amplitude A of the generating potential.
    pub interior_amplitude: f64,
    /// J_m(n0 k R), continuity value of the potential at the surface (per unit A).
    pub boundary_value: f64,
    /// Relative matching residual at the returned root.
    pub residual: f64,
    #[serde(skip)]
    y_surface: YLog,
}

/// Complex field components at one radius in the symmetry plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalField {
    pub r: f64,
    pub e_r: C64,
    pub e_phi: C64,
    pub e_z: C64,
    pub direction: Direction,
}

impl LocalField {
    pub fn norm_sqr(&self) -> f64 {
        self.e_r.norm_sqr() + self.e_phi.norm_sqr() + self.e_z.norm_sqr()
    }

    /// Overlaps with e_σ± = (e_r ± i e_φ)/√2 and e_π = e_z.
    pub fn polarization(&self) -> Result<PolarizationOverlaps> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroField(self.r));
        }
        let i = C64::new(0.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2 / n;
        Ok(PolarizationOverlaps::new((self.e_r - i * self.e_phi) * s, self.e_z / n, (self.e_r + i * self.e_phi) * s))
    }
}

/// Local polarization data of the two counter-propagating modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapSet {
    pub r: f64,
    pub modes: ModeOverlaps,
    /// |Σ_i α_i β_i*|².
    pub o: f64,
    /// Normalized transverse spin S_z/|E|² = |α_σ+|² − |α_σ-|².
    pub s_z_norm: f64,
}

impl OverlapSet {
    pub fn alpha_sigma_plus(&self) -> C64 {
        self.modes.alpha.sigma_plus
    }
    pub fn alpha_pi(&self) -> C64 {
        self.modes.alpha.pi
    }
    pub fn alpha_sigma_minus(&self) -> C64 {
        self.modes.alpha.sigma_minus
    }
    pub fn beta_sigma_plus(&self) -> C64 {
        self.modes.beta.sigma_plus
    }
    pub fn beta_pi(&self) -> C64 {
        self.modes.beta.pi
    }
    pub fn beta_sigma_minus(&self) -> C64 {
        self.modes.beta.sigma_minus
    }
}

/// One row of the radial profile export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r_minus_r_nm: f64,
    pub intensity_norm: f64,
    pub abs_er: f64,
    pub abs_ephi: f64,
    pub arg_er: f64,
    pub arg_ephi: f64,
    pub alpha_sp_sq: f64,
    pub alpha_sm_sq: f64,
    pub o: f64,
    pub ratio_r: f64,
}

impl ProfileRow {
    pub const HEADER: [&'static str; 10] = [
        "r_minus_R_nm",
        "intensity_norm",
        "abs_Er",
        "abs_Ephi",
        "arg_Er",
        "arg_Ephi",
        "alpha_sp_sq",
        "alpha_sm_sq",
        "O",
        "ratio_R",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.r_minus_r_nm,
            self.intensity_norm,
            self.abs_er,
            self.abs_ephi,
            self.arg_er,
            self.arg_ephi,
            self.alpha_sp_sq,
            self.alpha_sm_sq,
            self.o,
            self.ratio_r,
        ]
    }
}

struct Matching {
    /// Sign-preserving, overflow-free form of P J'(n0kR) Y(kR) − Y'(kR) J(n0kR), divided by |Y(kR)|.
    scaled: f64,
    residual: f64,
}

fn matching(spec: &ModeSpec, k: f64) -> Result<Matching> {
    let p = spec.matching_factor();
    let (j, jp) = bessel_j_with_derivative(spec.m, spec.n0 * k * spec.radius)?;
    let y = bessel_y_log(spec.m, k * spec.radius)?;
    let scaled = y.sign * (p * jp - y.log_derivative * j);
    let lhs = p * jp / j;
    let rhs = y.log_derivative;
    let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());
    Ok(Matching { scaled, residual })
}

fn scan_brackets(spec: &ModeSpec, window: (f64, f64), steps: usize, wanted: usize) -> Result<Vec<(f64, f64)>> {
    let k_ref = spec.m as f64 / (spec.n0 * spec.radius);
    let (lo, hi) = (window.0 * k_ref, window.1 * k_ref);
    let dk = (hi - lo) / steps as f64;
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let k = lo + dk * i as f64;
        let value = match matching(spec, k) {
            Ok(mt) if mt.scaled.is_finite() => mt.scaled,
            _ => {
                prev = None;
                continue;
            }
        };
        if let Some((k0, v0)) = prev {
            if v0 == 0.0 || v0.signum() != value.signum() {
                brackets.push((k0, k));
                if brackets.len() == wanted {
                    break;
                }
            }
        }
        prev = Some((k, value));
    }
    Ok(brackets)
}

fn bisect(spec: &ModeSpec, (mut lo, mut hi): (f64, f64)) -> Result<f64> {
    let mut f_lo = matching(spec, lo)?.scaled;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * mid {
            break;
        }
        let f_mid = matching(spec, mid)?.scaled;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // Of the two final bracket ends, keep the one with the smaller residual.
    let (r_lo, r_hi) = (matching(spec, lo)?.residual, matching(spec, hi)?.residual);
    Ok(if r_lo <= r_hi { lo } else { hi })
}

/// Finds the (p+1)-th root of the TM/TE matching condition and normalizes the mode so that
/// the peak interior |E| equals 1.
pub fn solve_resonance(spec: &ModeSpec) -> Result<ModeSolution> {
    spec.validate()?;
    let wanted = spec.p as usize + 1;
    let mut brackets = scan_brackets(spec, WINDOW, SCAN_STEPS, wanted)?;
    if brackets.len() < wanted {
        let steps = (SCAN_STEPS as f64 * (WIDE_WINDOW.1 - WIDE_WINDOW.0) / (WINDOW.1 - WINDOW.0)).ceil() as usize;
        brackets = scan_brackets(spec, WIDE_WINDOW, steps, wanted)?;
    }
    if brackets.len() < wanted {
        return Err(Error::NoRootInBracket { p: spec.p, found: brackets.len() });
    }
    let k = bisect(spec, brackets[spec.p as usize])?;
    let residual = matching(spec, k)?.residual;
    let (boundary_value, _) = bessel_j_with_derivative(spec.m, spec.n0 * k * spec.radius)?;
    let y_surface = bessel_y_log(spec.m, k * spec.radius)?;
    let mut sol = ModeSolution {
        spec: *spec,
        k_phi_r: k,
        f_p_m: k * spec.n0 * spec.radius / spec.m as f64,
        interior_amplitude: 1.0,
        boundary_value,
        residual,
        y_surface,
    };
    let peak = sol.interior_peak()?;
    sol.interior_amplitude = 1.0 / peak.1;
    Ok(sol)
}

impl ModeSolution {
    /// Refractive index at radius r (r = R counts as inside).
    pub fn index_at(&self, r: f64) -> f64 {
        if r <= self.spec.radius {
            self.spec.n0
        } else {
            1.0
        }
    }

    /// Exterior amplitude B = A J_m(n0kR)/Y_m(kR), when representable.
    pub fn exterior_amplitude(&self) -> f64 {
        self.interior_amplitude * self.boundary_value * self.y_surface.sign * (-self.y_surface.ln_abs).exp()
    }

    /// Potential ψ and its radial derivative at r.
    fn potential(&self, r: f64) -> Result<(f64, f64)> {
        let s = &self.spec;
        let k = self.k_phi_r;
        if r <= s.radius {
            let (j, jp) = bessel_j_with_derivative(s.m, s.n0 * k * r)?;
            Ok((self.interior_amplitude * j, self.interior_amplitude * s.n0 * k * jp))
        } else {
            let y = bessel_y_log(s.m, k * r)?;
            let psi = self.interior_amplitude * self.boundary_value * y.ratio_to(&self.y_surface);
            Ok((psi, psi * k * y.log_derivative))
        }
    }

    /// Field components at r for the requested circulation direction.
    pub fn field_at(&self, r: f64, direction: Direction) -> Result<LocalField> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius {r} must be positive")));
        }
        let (psi, dpsi) = self.potential(r)?;
        let zero = C64::new(0.0, 0.0);
        let k = self.k_phi_r;
        let mut f = match self.spec.polarization {
            Polarization::TM => {
                let eps = self.index_at(r).powi(2);
                LocalField {
                    r,
                    e_r: C64::new(self.spec.m as f64 * psi / (eps * k * r), 0.0),
                    e_phi: C64::new(0.0, -dpsi / (eps * k)),
                    e_z: zero,
                    direction,
                }
            }
            Polarization::TE => LocalField { r, e_r: zero, e_phi: zero, e_z: C64::new(psi, 0.0), direction },
        };
        if direction == Direction::Cw {
            f.e_r = f.e_r.conj();
            f.e_phi = f.e_phi.conj();
            f.e_z = f.e_z.conj();
        }
        Ok(f)
    }

    /// Radius and value of the largest interior |E| (at the current amplitude).
    fn interior_peak(&self) -> Result<(f64, f64)> {
        let s = &self.spec;
        let r_lo = 0.5 * s.radius.min(s.radius / self.f_p_m);
        let dr = (s.radius - r_lo) / NORMALIZATION_SAMPLES as f64;
        let norm = |r: f64| -> Result<f64> { Ok(self.field_at(r, Direction::Ccw)?.norm_sqr().sqrt()) };
        let mut best = (s.radius, norm(s.radius)?);
        for i in 0..NORMALIZATION_SAMPLES {
            let r = r_lo + dr * i as f64;
            let v = norm(r)?;
            if v > best.1 {
                best = (r, v);
            }
        }
        // Golden-section refinement around the best sample.
        let (mut a, mut b) = ((best.0 - dr).max(r_lo), (best.0 + dr).min(s.radius));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if norm(c)? > norm(d)? {
                b = d;
            } else {
                a = c;
            }
        }
        let r = 0.5 * (a + b);
        let v = norm(r)?;
        Ok(if v > best.1 { (r, v) } else { best })
    }

    /// Radius of the evanescent surface evaluation point.
    pub fn surface_radius(&self) -> f64 {
        self.spec.radius * (1.0 + SURFACE_OFFSET)
    }

    /// Polarization overlaps of both modes at r.
    pub fn overlaps_at(&self, r: f64) -> Result<OverlapSet> {
        let alpha = self.field_at(r, Direction::Ccw)?.polarization()?;
        let beta = self.field_at(r, Direction::Cw)?.polarization()?;
        let modes = ModeOverlaps { alpha, beta };
        Ok(OverlapSet {
            r,
            modes,
            o: modes.counter_propagating_overlap(),
            s_z_norm: alpha.sigma_plus.norm_sqr() - alpha.sigma_minus.norm_sqr(),
        })
    }

    /// |div E| / (n k |E|) from a central difference with step h = R·1e-7.
    pub fn gauss_residual(&self, r: f64) -> Result<f64> {
        let h = self.spec.radius * 1e-7;
        if !(r > 2.0 * h) || (r - self.spec.radius).abs() <= 2.0 * h {
            return Err(Error::Domain(format!(
                "divergence stencil at r = {r} crosses the origin or the surface"
            )));
        }
        let e = self.field_at(r, Direction::Ccw)?;
        let plus = self.field_at(r + h, Direction::Ccw)?;
        let minus = self.field_at(r - h, Direction::Ccw)?;
        let radial = ((r + h) * plus.e_r - (r - h) * minus.e_r) / (2.0 * h * r);
        let azimuthal = C64::new(0.0, -(self.spec.m as f64)) * e.e_phi / r;
        let n = e.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroField(r));
        }
        Ok((radial + azimuthal).norm() / (self.index_at(r) * self.k_phi_r * n))
    }

    /// Number of strict local minima of the interior intensity on a uniform grid.
    pub fn interior_minima(&self, samples: usize) -> Result<usize> {
        let s = &self.spec;
        let r_lo = 0.5 * s.radius;
        let dr = (s.radius - r_lo) / samples as f64;
        let mut vals = Vec::with_capacity(samples + 1);
        for i in 0..=samples {
            vals.push(self.field_at(r_lo + dr * i as f64, Direction::Ccw)?.norm_sqr());
        }
        Ok(vals.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count())
    }

    /// Radial profile rows at the given offsets from the surface (nm).
    pub fn radial_profile(&self, offsets_nm: &[f64]) -> Result<Vec<ProfileRow>> {
        offsets_nm
            .iter()
            .map(|&d| {
                let r = if d == 0.0 { self.surface_radius() } else { self.spec.radius + d * 1e-9 };
                let f = self.field_at(r, Direction::Ccw)?;
                let ov = self.overlaps_at(r)?;
                Ok(ProfileRow {
                    r_minus_r_nm: d,
                    intensity_norm: f.norm_sqr(),
                    abs_er: f.e_r.norm(),
                    abs_ephi: f.e_phi.norm(),
                    arg_er: f.e_r.arg(),
                    arg_ephi: f.e_phi.arg(),
                    alpha_sp_sq: ov.alpha_sigma_plus().norm_sqr(),
                    alpha_sm_sq: ov.alpha_sigma_minus().norm_sqr(),
                    o: ov.o,
                    ratio_r: f.e_phi.norm() / f.e_r.norm(),
                })
            })
            .collect()
    }
}

/// Intensity-modulation contrast √O of the standing wave formed by the two modes.
pub fn standing_wave_contrast(o: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&o) {
        return Err(Error::Domain(format!("overlap {o} outside [0, 1]")));
    }
    Ok(o.sqrt())
}
