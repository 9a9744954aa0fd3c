//! Dense vector kernels shared by every solver and problem.
//!
//! Everything here is sequential and allocation-light; problem sizes are a
//! few thousand, so there is no blocking, threading, or SIMD beyond what the
//! compiler finds on its own.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Default power-method iteration cap.
pub const POWER_METHOD_ITERS: usize = 200;
/// Default relative tolerance on successive Rayleigh quotients.
pub const POWER_METHOD_TOL: f64 = 1e-8;
/// A power-method estimate of the top eigenvalue is a lower bound; inflate it
/// by this factor before using it as a Lipschitz-constant contribution, which
/// must be an upper bound.
pub const SPECTRAL_INFLATION: f64 = 1.02;

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Dot kernel with four independent accumulators so the additions pipeline;
/// the summation order is fixed, keeping results deterministic.
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Inner product `sum_i a_i b_i`.
pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    Ok(dot_unchecked(a, b))
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

pub fn norm2_sq(x: &[f64]) -> f64 {
    dot_unchecked(x, x)
}

/// Elementwise `a*x + b*y`.
pub fn axpby(a: f64, x: &[f64], b: f64, y: &[f64]) -> Result<Vec<f64>> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect())
}

/// `x - y`, the most common axpby special case.
pub fn sub(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    axpby(1.0, x, -1.0, y)
}

pub fn scale(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Largest eigenvalue of a symmetric positive semidefinite operator,
/// i.e. `||A||_2^2` when the operator is `v -> A A^T v`.
///
/// Power iteration from a seeded unit start vector; stops when two
/// successive Rayleigh quotients agree to `tol` relatively or after
/// `iters` applications.
pub fn power_method_sq_norm(
    mut apply_gram: impl FnMut(&[f64]) -> Vec<f64>,
    m: usize,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    if m == 0 || iters == 0 {
        return Err(Error::InvalidParameter("power method needs m >= 1, iters >= 1".into()));
    }
    let mut rng = SplitMix64::stream(seed, 0xb0);
    let mut v = rng.normal_vec(m);
    let nv = norm2(&v);
    if nv == 0.0 {
        return Err(Error::Numerical("degenerate power-method start vector".into()));
    }
    v = scale(1.0 / nv, &v);

    let mut rayleigh_prev: Option<f64> = None;
    let mut rayleigh = 0.0;
    for _ in 0..iters {
        let w = apply_gram(&v);
        if w.len() != m {
            return Err(Error::DimensionMismatch { left: w.len(), right: m });
        }
        if !all_finite(&w) {
            return Err(Error::Numerical("non-finite operator output in power method".into()));
        }
        rayleigh = dot(&v, &w)?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Err(Error::Numerical("zero operator output in power method".into()));
        }
        v = scale(1.0 / nw, &w);
        if let Some(prev) = rayleigh_prev {
            if (rayleigh - prev).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
                return Ok(rayleigh);
            }
        }
        rayleigh_prev = Some(rayleigh);
    }
    Ok(rayleigh)
}

/// Euclidean projection onto the ball of the given radius centered at 0.
pub fn project_ball(x: &[f64], radius: f64) -> Vec<f64> {
    debug_assert!(radius > 0.0);
    let n = norm2(x);
    if n <= radius {
        x.to_vec()
    } else {
        scale(radius / n, x)
    }
}
