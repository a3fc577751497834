//! Small sparse matrix types: complex operators on Hilbert space and real CSR systems with a
//! restarted, ILU(0)-preconditioned GMRES solver.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Complex sparse operator stored as sorted rows of (column, value).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))))
    }

    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            *acc[r].entry(c).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let data = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect())
            .collect();
        SparseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.data[i]
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r]
            .binary_search_by_key(&c, |&(cc, _)| cc)
            .map(|k| self.data[r][k].1)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.rows, self.cols, self.triplets().map(|(r, c, v)| (r, c, v * s)))
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_triplets(self.rows, self.cols, self.triplets().chain(other.triplets())))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut triplets = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            for &(k, a) in row {
                for &(c, b) in &other.data[k] {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Ok(Self::from_triplets(self.rows, other.cols, triplets))
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &SparseMatrix) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                triplets.push((r1 * other.rows + r2, c1 * other.cols + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.rows, self.cols, C64::new(0.0, 0.0));
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest |A - A†| entry.
    pub fn hermiticity_error(&self) -> f64 {
        self.triplets().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &SparseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Real square matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { n, indptr, indices, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                m[(i, c)] += v;
            }
        }
        m
    }
}

/// Incomplete LU factorization with zero fill-in. Tiny pivots are replaced by one.
struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    fn new(a: &CsrMatrix) -> Self {
        let mut lu = a.clone();
        let n = lu.n;
        // Ensure every row stores its diagonal.
        let mut missing = Vec::new();
        for i in 0..n {
            if !lu.row(i).any(|(c, _)| c == i) {
                missing.push((i, i, 0.0));
            }
        }
        if !missing.is_empty() {
            let mut t: Vec<_> = (0..n).flat_map(|i| a.row(i).map(move |(c, v)| (i, c, v))).collect();
            t.extend(missing);
            lu = CsrMatrix::from_triplets(n, t);
        }
        let diag: Vec<usize> =
            (0..n).map(|i| (lu.indptr[i]..lu.indptr[i + 1]).find(|&k| lu.indices[k] == i).unwrap()).collect();
        let scale = lu.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (lu.indptr[i], lu.indptr[i + 1]);
            for k in start..end {
                pos[lu.indices[k]] = k;
            }
            for k in start..end {
                let col = lu.indices[k];
                if col >= i {
                    break;
                }
                let factor = lu.values[k] / lu.values[diag[col]];
                lu.values[k] = factor;
                for kk in diag[col] + 1..lu.indptr[col + 1] {
                    let p = pos[lu.indices[kk]];
                    if p != usize::MAX {
                        lu.values[p] -= factor * lu.values[kk];
                    }
                }
            }
            if lu.values[diag[i]].abs() < 1e-12 * scale {
                lu.values[diag[i]] = scale;
            }
            for k in start..end {
                pos[lu.indices[k]] = usize::MAX;
            }
        }
        Ilu0 { lu, diag }
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut y = r.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in self.lu.indptr[i]..self.diag[i] {
                s -= self.lu.values[k] * y[self.lu.indices[k]];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in self.diag[i] + 1..self.lu.indptr[i + 1] {
                s -= self.lu.values[k] * y[self.lu.indices[k]];
            }
            y[i] = s / self.lu.values[self.diag[i]];
        }
        y
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Right-preconditioned restarted GMRES with an ILU(0) preconditioner.
pub fn gmres(a: &CsrMatrix, b: &[f64], restart: usize, max_iter: usize, tol: f64) -> Result<IterativeSolution> {
    let n = a.n;
    let pre = Ilu0::new(a);
    let b_norm = norm(b).max(1e-300);
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    let residual_of = |x: &[f64]| -> Vec<f64> { a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect() };
    let mut r = residual_of(&x);
    let mut rel = norm(&r) / b_norm;
    while rel > tol && iterations < max_iter {
        let beta = norm(&r);
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::new();
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            iterations += 1;
            let zk = pre.apply(&v[k]);
            let mut w = a.matvec(&zk);
            z.push(zk);
            for (j, vj) in v.iter().enumerate() {
                let hj: f64 = w.iter().zip(vj).map(|(a, b)| a * b).sum();
                h[j][k] = hj;
                w.iter_mut().zip(vj).for_each(|(wi, vi)| *wi -= hj * vi);
            }
            let wn = norm(&w);
            h[k + 1][k] = wn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let d = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if d == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            if g[k + 1].abs() / b_norm <= tol * 0.1 || wn == 0.0 || iterations >= max_iter {
                break;
            }
            v.push(w.iter().map(|x| x / wn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            x.iter_mut().zip(zi).for_each(|(xx, zz)| *xx += yi * zz);
        }
        r = residual_of(&x);
        let new_rel = norm(&r) / b_norm;
        if k_used == 0 || !(new_rel < rel) && new_rel > tol {
            rel = new_rel;
            break;
        }
        rel = new_rel;
    }
    if rel > tol {
        return Err(Error::NonConvergence { residual: rel });
    }
    Ok(IterativeSolution { x, iterations, relative_residual: rel })
}
