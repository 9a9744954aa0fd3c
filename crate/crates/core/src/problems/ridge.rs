//! Ridge regression: least squares with Tikhonov regularization,
//! `f(x) = 1/2 ||Ax - b||^2 + (lambda/2) ||x||^2`.
//!
//! The measurement matrix is built from its singular value decomposition so
//! the spectrum — and with it the condition number — is exactly controlled:
//! `A = U S V^T` with seeded random orthonormal factors and singular values
//! linearly spaced over `[sigma_min, sigma_max]`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problems::Objective;
use crate::rng::SplitMix64;
use crate::vecops;

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSpec {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub seed: u64,
}

impl RidgeSpec {
    /// The configuration from the ridge experiment: 1200 x 2000, unit ridge,
    /// singular values from 100 down to 1 (so mu = 1, L ~ 10001).
    pub fn paper(seed: u64) -> Self {
        Self { m: 1200, n: 2000, lambda: 1.0, sigma_max: 100.0, sigma_min: 1.0, seed }
    }

    pub fn key(&self) -> String {
        format!(
            "ridge-m{}-n{}-l{}-shi{}-slo{}-seed{}",
            self.m, self.n, self.lambda, self.sigma_max, self.sigma_min, self.seed
        )
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.m > self.n {
            return Err(Error::InvalidParameter(format!(
                "ridge needs 1 <= m <= n, got m={}, n={}",
                self.m, self.n
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter("ridge lambda must be > 0".into()));
        }
        if !(self.sigma_min > 0.0 && self.sigma_max >= self.sigma_min) {
            return Err(Error::InvalidParameter("need sigma_max >= sigma_min > 0".into()));
        }
        Ok(())
    }
}

pub struct RidgeObjective {
    a: DenseMatrix,
    b: Vec<f64>,
    lambda: f64,
    mu: f64,
    lip: f64,
}

impl RidgeObjective {
    /// Wraps explicit data with explicit curvature constants. Used directly
    /// by the quadratic benchmark (lambda = 0, constants known exactly).
    pub fn with_constants(a: DenseMatrix, b: Vec<f64>, lambda: f64, mu: f64, lip: f64) -> Self {
        Self { a, b, lambda, mu, lip }
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Value and gradient of the ridge objective at `x`:
/// `(1/2 ||Ax-b||^2 + lambda/2 ||x||^2, A^T(Ax-b) + lambda x)`.
pub fn ridge_value_grad(
    a: &DenseMatrix,
    b: &[f64],
    lambda: f64,
    x: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let r = vecops::sub(&a.matvec(x)?, b)?;
    let value = 0.5 * vecops::norm2_sq(&r) + 0.5 * lambda * vecops::norm2_sq(x);
    let grad = vecops::axpby(1.0, &a.matvec_t(&r)?, lambda, x)?;
    Ok((value, grad))
}

impl Objective for RidgeObjective {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn mu(&self) -> f64 {
        self.mu
    }

    fn lip(&self) -> f64 {
        self.lip
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = vecops::sub(&self.a.matvec(x).expect("dim"), &self.b).expect("dim");
        0.5 * vecops::norm2_sq(&r) + 0.5 * self.lambda * vecops::norm2_sq(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_grad(x).1
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = ridge_value_grad(&self.a, &self.b, self.lambda, x).expect("dim");
        (v, g)
    }
}

pub struct RidgeProblem {
    pub spec: RidgeSpec,
    pub objective: RidgeObjective,
}

/// Builds the seeded ridge instance. A rank-deficient Gram-Schmidt draw
/// (essentially impossible for Gaussian input, but contract-checked) retries
/// with an incremented seed up to three times.
pub fn ridge_build(spec: &RidgeSpec) -> Result<RidgeProblem> {
    spec.validate()?;
    let mut last_err = None;
    for attempt in 0..4 {
        let seed = spec.seed.wrapping_add(attempt);
        match try_build(spec, seed) {
            Ok(p) => return Ok(p),
            Err(e @ Error::Generation(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn try_build(spec: &RidgeSpec, seed: u64) -> Result<RidgeProblem> {
    let (m, n) = (spec.m, spec.n);
    let u = DenseMatrix::orthonormal_rows(m, m, &mut SplitMix64::stream(seed, 1))?;
    // rows of vt are the m orthonormal columns of V (n x m)
    let vt = DenseMatrix::orthonormal_rows(m, n, &mut SplitMix64::stream(seed, 2))?;
    let sigma = linspace(spec.sigma_max, spec.sigma_min, m);

    // A = U S V^T, assembled row by row: A[i,:] = sum_k U[i,k] sigma[k] vt[k,:]
    let mut a = DenseMatrix::zeros(m, n);
    let mut row = vec![0.0; n];
    for i in 0..m {
        row.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..m {
            let c = u.get(i, k) * sigma[k];
            for (acc, v) in row.iter_mut().zip(vt.row(k)) {
                *acc += c * v;
            }
        }
        for (j, v) in row.iter().enumerate() {
            a.set(i, j, *v);
        }
    }

    let b = SplitMix64::stream(seed, 3).normal_vec(m);

    let gram = |v: &[f64]| {
        let t = a.matvec_t(v).expect("dim");
        a.matvec(&t).expect("dim")
    };
    let est = vecops::power_method_sq_norm(
        gram,
        m,
        vecops::POWER_METHOD_ITERS,
        vecops::POWER_METHOD_TOL,
        seed,
    )?;
    let lip = vecops::SPECTRAL_INFLATION * est + spec.lambda;

    Ok(RidgeProblem {
        spec: spec.clone(),
        objective: RidgeObjective::with_constants(a, b, spec.lambda, spec.lambda, lip),
    })
}

pub(crate) fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![from];
    }
    (0..count)
        .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
        .collect()
}
