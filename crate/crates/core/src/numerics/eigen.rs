//! Dense complex eigendecomposition.
//!
//! Backed by faer's Schur-based solver. Results are put in a canonical form so
//! that sweeps are reproducible: pairs are sorted by (Re ω, Im ω) and every
//! eigenvector is scaled so its largest-magnitude component equals exactly 1.

use std::ops::{Index, IndexMut};

use faer::{Mat, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Congruence-style reduction `Bᵀ A B` for a real basis stored as columns
    /// of sparse (index, weight) lists.
    pub fn reduce(&self, basis: &[Vec<(usize, f64)>]) -> ComplexMatrix {
        let m = basis.len();
        // A·B first, one column at a time
        let mut ab = vec![Complex64::new(0.0, 0.0); self.n * m];
        for (col, vec) in basis.iter().enumerate() {
            for row in 0..self.n {
                let r = self.row(row);
                let mut acc = Complex64::new(0.0, 0.0);
                for &(k, w) in vec {
                    acc += r[k] * w;
                }
                ab[row * m + col] = acc;
            }
        }
        ComplexMatrix::from_fn(m, |i, j| {
            basis[i].iter().map(|&(k, w)| ab[k * m + j] * w).sum()
        })
    }

    /// `P A P` with `P = 1 − Σ v vᵀ` for real orthonormal `vs`, as rank
    /// updates in O(n²) per vector.
    pub fn project_out(&self, vs: &[Vec<f64>]) -> ComplexMatrix {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        // Vᵀ A (rows) and A V (columns)
        let vt_a: Vec<Vec<Complex64>> = vs
            .iter()
            .map(|v| {
                let mut row = vec![zero; n];
                for (i, &vi) in v.iter().enumerate() {
                    if vi != 0.0 {
                        for (acc, a) in row.iter_mut().zip(self.row(i)) {
                            *acc += a * vi;
                        }
                    }
                }
                row
            })
            .collect();
        let a_v: Vec<Vec<Complex64>> = vs
            .iter()
            .map(|v| (0..n).map(|i| self.row(i).iter().zip(v).map(|(a, &w)| a * w).sum()).collect())
            .collect();
        let vt_a_v: Vec<Vec<Complex64>> = vt_a
            .iter()
            .map(|row| vs.iter().map(|v| row.iter().zip(v).map(|(a, &w)| a * w).sum()).collect())
            .collect();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let mut delta = zero;
                for (k, vk) in vs.iter().enumerate() {
                    delta += vt_a[k][j] * vk[i] + a_v[k][i] * vs[k][j];
                    for (l, vl) in vs.iter().enumerate() {
                        delta -= vk[i] * vt_a_v[k][l] * vl[j];
                    }
                }
                out[(i, j)] -= delta;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// Normalized so the largest-magnitude component is exactly 1.
    pub vector: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub pairs: Vec<EigenPair>,
}

impl EigenDecomposition {
    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

/// Relative residual tolerance on ‖A v − ω v‖∞ / ‖v‖∞, in units of ‖A‖∞.
pub const EIG_TOL: f64 = 1e-8;

pub fn eig_dense(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition { pairs: Vec::new() });
    }
    let norm = a.norm_inf();
    let failure = || Error::EigenFailure { dim: n, norm };
    if !norm.is_finite() {
        return Err(failure());
    }

    // Sweep-level parallelism only; keeps results independent of thread count.
    faer::set_global_parallelism(Par::Seq);
    let mat = Mat::<Complex64>::from_fn(n, n, |i, j| a[(i, j)]);
    let evd = mat.eigen().map_err(|_| failure())?;
    let s = evd.S();
    let u = evd.U();
    let product = &mat * u;

    let tol = EIG_TOL * norm.max(f64::MIN_POSITIVE);
    let mut pairs = Vec::with_capacity(n);
    for col in 0..n {
        let value = s.column_vector()[col];
        let mut vmax = 0.0f64;
        let mut pivot = Complex64::new(1.0, 0.0);
        let mut residual = 0.0f64;
        for row in 0..n {
            let z = u[(row, col)];
            if z.norm() > vmax {
                vmax = z.norm();
                pivot = z;
            }
            residual = residual.max((product[(row, col)] - value * z).norm());
        }
        if !(vmax > 0.0) || !(residual / vmax <= tol) || !value.re.is_finite() {
            return Err(failure());
        }
        let vector = (0..n).map(|row| u[(row, col)] / pivot).collect();
        pairs.push(EigenPair { value, vector });
    }
    pairs.sort_by(|x, y| {
        x.value
            .re
            .total_cmp(&y.value.re)
            .then(x.value.im.total_cmp(&y.value.im))
    });
    Ok(EigenDecomposition { pairs })
}

/// Eigenvalues only, sorted by (Re, Im).
pub fn eigenvalues_dense(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let norm = a.norm_inf();
    faer::set_global_parallelism(Par::Seq);
    let mat = Mat::<Complex64>::from_fn(n, n, |i, j| a[(i, j)]);
    let mut values = mat
        .eigenvalues()
        .map_err(|_| Error::EigenFailure { dim: n, norm })?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}
