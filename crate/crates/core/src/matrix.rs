//! Row-major dense matrices: the measurement operators of the benchmark
//! problems, plus the small direct solver used for reference solutions.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::vecops;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { left: data.len(), right: rows * cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn gaussian(rows: usize, cols: usize, rng: &mut SplitMix64) -> Self {
        let mut m = Self::zeros(rows, cols);
        rng.fill_normal(&mut m.data);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { left: x.len(), right: self.cols });
        }
        Ok((0..self.rows).map(|i| vecops::dot_unchecked(self.row(i), x)).collect())
    }

    /// `A^T y`, computed as a row-wise accumulation so memory access stays
    /// sequential in the row-major layout.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch { left: y.len(), right: self.rows });
        }
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        Ok(out)
    }

    /// Orthonormal rows via modified Gram-Schmidt with one full
    /// reorthogonalization pass. Returns `Err` on rank deficiency, which for
    /// Gaussian input signals a degenerate draw the caller should retry.
    pub fn orthonormal_rows(rows: usize, cols: usize, rng: &mut SplitMix64) -> Result<Self> {
        assert!(rows <= cols, "cannot orthonormalize {rows} rows of length {cols}");
        let mut q = Self::gaussian(rows, cols, rng);
        for i in 0..rows {
            let (done, rest) = q.data.split_at_mut(i * cols);
            let current = &mut rest[..cols];
            let original_norm = vecops::norm2(current);
            // two passes of orthogonalization against the finished rows
            for _pass in 0..2 {
                for j in 0..i {
                    let qj = &done[j * cols..(j + 1) * cols];
                    let proj: f64 = current.iter().zip(qj).map(|(a, b)| a * b).sum();
                    for (a, b) in current.iter_mut().zip(qj) {
                        *a -= proj * b;
                    }
                }
            }
            let norm = vecops::norm2(current);
            if !(norm > 1e-10 * original_norm.max(f64::MIN_POSITIVE)) {
                return Err(Error::Generation(format!(
                    "rank-deficient Gram-Schmidt at row {i}"
                )));
            }
            let inv = 1.0 / norm;
            for a in current.iter_mut() {
                *a *= inv;
            }
        }
        Ok(q)
    }
}

/// Solves the square system `A x = b` by LU factorization with partial
/// pivoting. Small systems only; used for reference solutions and oracles.
pub fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { left: a.rows(), right: a.cols() });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { left: b.len(), right: n });
    }
    let mut lu = a.data.clone();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let (mut pivot_row, mut pivot_val) = (col, lu[perm[col] * n + col].abs());
        for r in (col + 1)..n {
            let v = lu[perm[r] * n + col].abs();
            if v > pivot_val {
                pivot_row = r;
                pivot_val = v;
            }
        }
        if pivot_val == 0.0 || !pivot_val.is_finite() {
            return Err(Error::Numerical(format!("singular matrix at column {col}")));
        }
        perm.swap(col, pivot_row);
        let p = perm[col];
        for r in (col + 1)..n {
            let q = perm[r];
            let factor = lu[q * n + col] / lu[p * n + col];
            lu[q * n + col] = factor;
            for c in (col + 1)..n {
                lu[q * n + c] -= factor * lu[p * n + c];
            }
        }
    }
    // forward substitution (unit lower)
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = x[perm[i]];
        for j in 0..i {
            s -= lu[perm[i] * n + j] * y[j];
        }
        y[i] = s;
    }
    // back substitution
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lu[perm[i] * n + j] * x[j];
        }
        x[i] = s / lu[perm[i] * n + i];
    }
    Ok(x)
}
