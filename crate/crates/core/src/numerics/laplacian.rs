use super::eigen::ComplexMatrix;
use num_complex::Complex64;

/// Symmetric banded matrix: `bands[0]` is the diagonal and `bands[k]` the
/// k-th off-diagonal, shared by the upper and lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBanded {
    pub bands: Vec<Vec<f64>>,
}

impl SymmetricBanded {
    pub fn dim(&self) -> usize {
        self.bands[0].len()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn diag(&self) -> &[f64] {
        &self.bands[0]
    }

    /// Entry (i, j), zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let k = i.abs_diff(j);
        if k > self.bandwidth() {
            0.0
        } else {
            self.bands[k][i.min(j)]
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out: Vec<f64> = self.bands[0].iter().zip(v).map(|(d, x)| d * x).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &b) in band.iter().enumerate() {
                out[i] += b * v[i + k];
                out[i + k] += b * v[i];
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { bands: self.bands.iter().map(|b| b.iter().map(|x| x * factor).collect()).collect() }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, j| Complex64::new(self.get(i, j), 0.0))
    }

    /// Solves `(self + diag(shift)) x = rhs` by banded elimination without
    /// pivoting, O(n·p²). Requires the shifted matrix to be safe without
    /// pivoting, e.g. positive definite.
    pub fn solve_shifted(&self, shift: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let p = self.bandwidth();
        let w = 2 * p + 1;
        // row i holds columns i − p ..= i + p
        let mut a = vec![0.0; n * w];
        for i in 0..n {
            for j in i.saturating_sub(p)..(i + p + 1).min(n) {
                a[i * w + j + p - i] = self.get(i, j);
            }
            a[i * w + p] += shift[i];
        }
        let mut x = rhs.to_vec();
        for k in 0..n {
            let pivot = a[k * w + p];
            for i in k + 1..(k + p + 1).min(n) {
                let l = a[i * w + k + p - i] / pivot;
                if l == 0.0 {
                    continue;
                }
                for j in k..(k + p + 1).min(n) {
                    a[i * w + j + p - i] -= l * a[k * w + j + p - k];
                }
                x[i] -= l * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..(k + p + 1).min(n) {
                s -= a[k * w + j + p - k] * x[j];
            }
            x[k] = s / a[k * w + p];
        }
        x
    }
}

/// Second-order central-difference `d²/dx²` on `n_points` samples with
/// homogeneous Dirichlet values just outside both ends.
pub fn laplacian_1d(n_points: usize, spacing: f64) -> SymmetricBanded {
    assert!(n_points >= 3, "laplacian needs at least 3 points");
    assert!(spacing > 0.0, "spacing must be positive");
    let inv_h2 = 1.0 / (spacing * spacing);
    SymmetricBanded { bands: vec![vec![-2.0 * inv_h2; n_points], vec![inv_h2; n_points - 1]] }
}

/// Fourth-order five-point `d²/dx²` with Dirichlet walls one spacing
/// outside both ends. The node beyond the wall is the odd reflection of the
/// first interior node, which keeps the matrix symmetric.
pub fn laplacian_1d_fourth_order(n_points: usize, spacing: f64) -> SymmetricBanded {
    assert!(n_points >= 5, "five-point laplacian needs at least 5 points");
    assert!(spacing > 0.0, "spacing must be positive");
    let s = 1.0 / (12.0 * spacing * spacing);
    let mut diag = vec![-30.0 * s; n_points];
    diag[0] += s;
    diag[n_points - 1] += s;
    SymmetricBanded { bands: vec![diag, vec![16.0 * s; n_points - 1], vec![-s; n_points - 2]] }
}
