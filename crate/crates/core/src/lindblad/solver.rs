use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::HilbertLayout;
use crate::error::{Error, Result};
use crate::sparse::{gmres, CsrMatrix, SparseMatrix};
use crate::C64;

/// Linear solver selection and tolerances for the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Largest number of entries of the real Liouvillian still solved densely.
    pub dense_limit: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    pub gmres_tol: f64,
    /// Acceptance threshold for ‖L ρ‖ / ‖L‖_F.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { dense_limit: 4e7, gmres_restart: 80, gmres_max_iter: 20_000, gmres_tol: 1e-13, residual_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveMethod {
    Dense,
    Gmres { iterations: usize },
}

/// Quality measures of a steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub method: SolveMethod,
    /// ‖L ρ‖ / ‖L‖_F.
    pub residual: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Steady-state density operator with derived mode amplitudes and populations.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DMatrix<C64>,
    pub a_mean: C64,
    pub b_mean: C64,
    pub photons_a: f64,
    pub photons_b: f64,
    /// Populations of the atomic levels (traced over the modes).
    pub populations: Vec<f64>,
    pub top_shell_population: f64,
    pub diagnostics: SolveDiagnostics,
    pub warnings: Vec<String>,
}

/// Population threshold of the highest Fock shell above which the truncation is reported.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

/// Coordinates of a Hermitian d×d matrix: diagonal entries, then Re/Im of the upper triangle,
/// laid out so that (i, i) → i d + i, Re(i, j) → i d + j and Im(i, j) → j d + i for i < j.
struct RealBasis {
    d: usize,
}

impl RealBasis {
    /// Elementary contributions (i, j, c) composing basis element p.
    fn units(&self, p: usize) -> Vec<(usize, usize, C64)> {
        let (r, c) = (p / self.d, p % self.d);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        if r == c {
            vec![(r, r, one)]
        } else if r < c {
            vec![(r, c, one), (c, r, one)]
        } else {
            vec![(c, r, i), (r, c, -i)]
        }
    }

    fn coordinates(&self, a: usize, b: usize, v: C64) -> [(usize, f64); 2] {
        if a == b {
            [(a * self.d + a, v.re), (usize::MAX, 0.0)]
        } else {
            [(a * self.d + b, v.re), (b * self.d + a, v.im)]
        }
    }

    fn to_matrix(&self, x: &[f64]) -> DMatrix<C64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |a, b| {
            if a == b {
                C64::new(x[a * d + a], 0.0)
            } else if a < b {
                C64::new(x[a * d + b], x[b * d + a])
            } else {
                C64::new(x[b * d + a], -x[a * d + b])
            }
        })
    }
}

/// Real representation of L ρ = K ρ + ρ K† + Σ_k L_k ρ L_k†, with K = −iH − ½ Σ L_k† L_k.
fn real_liouvillian(h: &SparseMatrix, collapse: &[SparseMatrix]) -> Result<CsrMatrix> {
    let d = h.rows();
    let mut k = h.scale(C64::new(0.0, -1.0));
    for l in collapse {
        if l.rows() != d || l.cols() != d {
            return Err(Error::DimensionMismatch(format!("collapse operator {}x{} vs Hamiltonian {d}x{d}", l.rows(), l.cols())));
        }
        k = k.sub(&l.adjoint().mul(l)?.scale(C64::new(0.5, 0.0)))?;
    }
    let k_cols = k.transpose();
    let l_cols: Vec<SparseMatrix> = collapse.iter().map(SparseMatrix::transpose).collect();
    let basis = RealBasis { d };
    let mut triplets = Vec::new();
    let mut acc: HashMap<(usize, usize), C64> = HashMap::new();
    for p in 0..d * d {
        acc.clear();
        for (i, j, c) in basis.units(p) {
            for &(a, kai) in k_cols.row(i) {
                if a <= j {
                    *acc.entry((a, j)).or_default() += c * kai;
                }
            }
            for &(b, kbj) in k_cols.row(j) {
                if i <= b {
                    *acc.entry((i, b)).or_default() += c * kbj.conj();
                }
            }
            for l in &l_cols {
                for &(a, lai) in l.row(i) {
                    for &(b, lbj) in l.row(j) {
                        if a <= b {
                            *acc.entry((a, b)).or_default() += c * lai * lbj.conj();
                        }
                    }
                }
            }
        }
        for (&(a, b), &v) in &acc {
            for (row, val) in basis.coordinates(a, b, v) {
                if row != usize::MAX && val != 0.0 {
                    triplets.push((row, p, val));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(d * d, triplets))
}

/// Replaces the (0, 0) row with the trace constraint.
fn with_trace_row(l: &CsrMatrix, d: usize) -> CsrMatrix {
    let n = l.n();
    let mut t: Vec<(usize, usize, f64)> = (1..n).flat_map(|i| l.row(i).map(move |(c, v)| (i, c, v))).collect();
    t.extend((0..d).map(|i| (0, i * d + i, 1.0)));
    CsrMatrix::from_triplets(n, t)
}

fn expectation(op: &SparseMatrix, rho: &DMatrix<C64>) -> C64 {
    op.triplets().map(|(r, c, v)| v * rho[(c, r)]).sum()
}

/// Solves L ρ = 0 with Tr ρ = 1.
pub fn steady_state(h: &SparseMatrix, collapse: &[SparseMatrix], layout: &HilbertLayout, options: &SolverOptions) -> Result<SteadyState> {
    let d = layout.dim();
    if h.rows() != d || h.cols() != d {
        return Err(Error::DimensionMismatch(format!("Hamiltonian is {}x{}, layout has dimension {d}", h.rows(), h.cols())));
    }
    let liouvillian = real_liouvillian(h, collapse)?;
    let system = with_trace_row(&liouvillian, d);
    let n = d * d;
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;

    let (x, method) = if (n as f64) * (n as f64) <= options.dense_limit {
        let a = system.to_dense();
        let lu = a.clone().lu();
        let b = DVector::from_vec(rhs.clone());
        let mut x = lu.solve(&b).ok_or(Error::NonConvergence { residual: f64::INFINITY })?;
        // One step of iterative refinement.
        let r = &b - &a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        (x.as_slice().to_vec(), SolveMethod::Dense)
    } else {
        let sol = gmres(&system, &rhs, options.gmres_restart, options.gmres_max_iter, options.gmres_tol)?;
        (sol.x, SolveMethod::Gmres { iterations: sol.iterations })
    };

    let lx = liouvillian.matvec(&x);
    let residual = lx.iter().map(|v| v * v).sum::<f64>().sqrt() / liouvillian.frobenius_norm().max(1e-300);
    if !(residual < options.residual_tol) {
        return Err(Error::NonConvergence { residual });
    }

    let rho = RealBasis { d }.to_matrix(&x);
    let trace: C64 = (0..d).map(|i| rho[(i, i)]).sum();
    let hermiticity_error = (&rho - rho.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_eigenvalue = rho.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);

    let a = layout.mode_a();
    let b = layout.mode_b();
    let nf = layout.n_fock();
    let mut populations = vec![0.0; layout.atom_dim];
    let (mut top, mut photons_a, mut photons_b) = (0.0, 0.0, 0.0);
    for s in 0..layout.atom_dim {
        for (f, &(na, nb)) in layout.fock.iter().enumerate() {
            let p = rho[(s * nf + f, s * nf + f)].re;
            populations[s] += p;
            photons_a += na as f64 * p;
            photons_b += nb as f64 * p;
            if na + nb == layout.n_max {
                top += p;
            }
        }
    }
    let mut warnings = Vec::new();
    if top > TRUNCATION_THRESHOLD {
        let msg = format!("top Fock shell population {top:.3e} exceeds {TRUNCATION_THRESHOLD:.0e}; raise n_max or lower the drive");
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(SteadyState {
        a_mean: expectation(&a, &rho),
        b_mean: expectation(&b, &rho),
        photons_a,
        photons_b,
        populations,
        top_shell_population: top,
        diagnostics: SolveDiagnostics {
            method,
            residual,
            trace_error: (trace - C64::new(1.0, 0.0)).norm(),
            hermiticity_error,
            min_eigenvalue,
        },
        warnings,
        rho,
    })
}
