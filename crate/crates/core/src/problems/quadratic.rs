//! Synthetic positive definite quadratic with exact condition number,
//! expressed in least-squares form so the same machinery (including CGLS)
//! applies: `f(x) = 1/2 ||Ax - b||^2` with `A = D^{1/2} V^T`, `V` random
//! orthogonal and the eigenvalues `D` of the Hessian `A^T A = V D V^T`
//! linearly spaced over `[1, kappa]`. So mu = 1 and L = kappa, exactly.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problems::ridge::{linspace, RidgeObjective};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpec {
    pub n: usize,
    pub kappa: f64,
    pub seed: u64,
}

impl QuadSpec {
    pub fn new(n: usize, kappa: f64, seed: u64) -> Self {
        Self { n, kappa, seed }
    }

    pub fn key(&self) -> String {
        format!("quad-n{}-k{}-seed{}", self.n, self.kappa, self.seed)
    }
}

pub struct QuadProblem {
    pub spec: QuadSpec,
    pub objective: RidgeObjective,
    /// Closed-form minimizer `V D^{-1/2} b`.
    pub x_star: Vec<f64>,
}

pub fn quad_build(spec: &QuadSpec) -> Result<QuadProblem> {
    if spec.n < 2 {
        return Err(Error::InvalidParameter("quadratic needs n >= 2".into()));
    }
    if !(spec.kappa >= 1.0 && spec.kappa.is_finite()) {
        return Err(Error::InvalidParameter("quadratic needs kappa >= 1".into()));
    }
    let n = spec.n;
    let vt = DenseMatrix::orthonormal_rows(n, n, &mut SplitMix64::stream(spec.seed, 1))?;
    let eigs = linspace(1.0, spec.kappa, n);
    let mut a = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let s = eigs[k].sqrt();
        for j in 0..n {
            a.set(k, j, s * vt.get(k, j));
        }
    }
    let b = SplitMix64::stream(spec.seed, 2).normal_vec(n);

    // x* = V D^{-1/2} b, i.e. sum_k (b_k / sqrt(d_k)) * row_k(V^T)
    let mut x_star = vec![0.0; n];
    for k in 0..n {
        let c = b[k] / eigs[k].sqrt();
        for (x, v) in x_star.iter_mut().zip(vt.row(k)) {
            *x += c * v;
        }
    }

    Ok(QuadProblem {
        spec: spec.clone(),
        objective: RidgeObjective::with_constants(a, b, 0.0, 1.0, spec.kappa),
        x_star,
    })
}
