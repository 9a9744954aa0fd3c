//! Running estimate-sequence state.
//!
//! With `phi_0(x) = f(x_0) + (mu/2) ||x - x_0||^2`, every update
//!
//! ```text
//! phi_{k+1}(x) = (1 - a) phi_k(x)
//!              + a [ f(y_k) + <f'(y_k), x - y_k> + (mu/2) ||x - y_k||^2 ]
//! ```
//!
//! keeps the canonical form `phi_k(x) = phi*_k + (mu/2) ||x - v_k||^2`, so
//! tracking the pair `(phi*_k, v_k)` plus the contraction product
//! `lambda_k = prod (1 - a_i)` is enough to check `f(x_k) <= phi*_k` and the
//! induced convergence bounds at run time.

use crate::error::Result;
use crate::vecops;

/// `v' = (1 - alpha) v + alpha y - (alpha / mu) g`.
///
/// Shared by the tracker and the adaptive solver so both sides of the
/// invariant check see bit-identical center sequences.
pub fn advance_center(v: &[f64], y: &[f64], g: &[f64], alpha: f64, mu: f64) -> Result<Vec<f64>> {
    let blend = vecops::axpby(1.0 - alpha, v, alpha, y)?;
    vecops::axpby(1.0, &blend, -alpha / mu, g)
}

#[derive(Debug, Clone)]
pub struct EstimateTracker {
    lambda: f64,
    phi_star: f64,
    v: Vec<f64>,
}

impl EstimateTracker {
    /// Start with `phi*_0 = f(x_0)`, `v_0 = x_0`, `lambda_0 = 1`.
    pub fn new(f_x0: f64, x0: &[f64]) -> Self {
        Self { lambda: 1.0, phi_star: f_x0, v: x0.to_vec() }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi_star(&self) -> f64 {
        self.phi_star
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// One estimate-sequence update with step `alpha` at point `y` with
    /// gradient `grad_y` and value `f_y`. The minimum-value recursion reads
    /// the center before it moves; order matters.
    pub fn advance(&mut self, alpha: f64, y: &[f64], grad_y: &[f64], f_y: f64, mu: f64) -> Result<()> {
        let v_minus_y = vecops::sub(&self.v, y)?;
        let dist_sq = vecops::norm2_sq(&v_minus_y);
        let cross = vecops::dot(grad_y, &v_minus_y)?;
        let grad_sq = vecops::norm2_sq(grad_y);

        self.phi_star = (1.0 - alpha) * self.phi_star + alpha * f_y
            - alpha * alpha / (2.0 * mu) * grad_sq
            + alpha * (1.0 - alpha) * (0.5 * mu * dist_sq + cross);
        self.v = advance_center(&self.v, y, grad_y, alpha, mu)?;
        self.lambda *= 1.0 - alpha;
        Ok(())
    }
}
