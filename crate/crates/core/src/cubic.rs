//! The feasibility cubic behind the adaptive step parameter.
//!
//! Replacing the current gradient norm with the previous one turns the step
//! acceptance constraint into a cubic inequality in alpha:
//!
//! ```text
//! eta(alpha) = alpha^3 + (1 + D) alpha^2 - (rho + D) alpha - rho <= 0
//! ```
//!
//! with `rho = mu / L` the reciprocal condition number and
//! `D = mu^2 ||x - v||^2 / ||g_prev||^2` a dimensionless measure of how far
//! the iterate sits from the estimate-sequence center. For `D > 0` and
//! `rho < 1`, eta has exactly one positive local minimum `beta` and one
//! positive root `gamma`, with `eta(sqrt(rho)) = D (rho - sqrt(rho)) <= 0`,
//! so any alpha in `[sqrt(rho), gamma]` is admissible. The four selection
//! heuristics interpolate between the safe lower end and the root.

use crate::error::{Error, Result};

/// Parameters `(rho, D)` pinning one iteration's feasibility cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicParams {
    rho: f64,
    d: f64,
}

/// Trial-step selection rule, ordered from conservative to aggressive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heuristic {
    /// `max(sqrt(rho), beta)`
    H1,
    /// midpoint of `sqrt(rho)` and `gamma`
    H2,
    /// midpoint of `max(sqrt(rho), beta)` and `gamma`
    H3,
    /// `gamma` itself
    H4,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [Heuristic::H1, Heuristic::H2, Heuristic::H3, Heuristic::H4];
}

impl CubicParams {
    pub fn new(rho: f64, d: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho = {rho} not in (0, 1]")));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("D = {d} not finite and >= 0")));
        }
        Ok(Self { rho, d })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn sqrt_rho(&self) -> f64 {
        self.rho.sqrt()
    }

    /// `eta(alpha)`.
    pub fn eta(&self, alpha: f64) -> f64 {
        alpha * alpha * alpha + (1.0 + self.d) * alpha * alpha
            - (self.rho + self.d) * alpha
            - self.rho
    }

    /// `eta'(alpha)`.
    pub fn eta_prime(&self, alpha: f64) -> f64 {
        3.0 * alpha * alpha + 2.0 * (1.0 + self.d) * alpha - (self.rho + self.d)
    }

    /// The positive local minimum of eta, in closed form from the quadratic
    /// eta'. The discriminant `(1+D)^2 + 3(rho+D)` is always positive.
    pub fn beta(&self) -> f64 {
        let b = 1.0 + self.d;
        (-b + (b * b + 3.0 * (self.rho + self.d)).sqrt()) / 3.0
    }

    /// The unique positive root of eta.
    ///
    /// `D = 0` factors as `(alpha + 1)(alpha^2 - rho)`, so the root is
    /// `sqrt(rho)` exactly. Otherwise the root is bracketed in
    /// `[max(beta, sqrt(rho)), 1]` — eta is negative at the left end and
    /// `eta(1) = 2(1 - rho) > 0` — and isolated by bisection with one
    /// Newton polish step for the last digit.
    pub fn gamma(&self) -> Result<f64> {
        if self.d == 0.0 {
            return Ok(self.sqrt_rho());
        }
        if !(self.rho < 1.0) {
            // eta(1) = 2(1 - rho) = 0: the bracket collapses; rho = 1 with
            // D > 0 means the root is exactly 1.
            return Ok(1.0);
        }
        let mut lo = self.beta().max(self.sqrt_rho());
        let mut hi = 1.0;
        let f_lo = self.eta(lo);
        if !f_lo.is_finite() {
            return Err(Error::Numerical(format!("eta not finite at bracket start {lo}")));
        }
        if f_lo >= 0.0 {
            // only possible through rounding when the root sits at the
            // bracket edge; the edge is then the answer
            return Ok(lo);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.eta(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        let mut root = 0.5 * (lo + hi);
        let slope = self.eta_prime(root);
        if slope > 0.0 {
            let polished = root - self.eta(root) / slope;
            if polished.is_finite() && polished >= lo - f64::EPSILON && polished <= hi + f64::EPSILON
            {
                root = polished;
            }
        }
        Ok(root)
    }

    /// Trial alpha under the given heuristic; always `>= sqrt(rho)`.
    pub fn propose_alpha(&self, h: Heuristic) -> Result<f64> {
        let a0 = self.sqrt_rho();
        let v = match h {
            Heuristic::H1 => a0.max(self.beta()),
            Heuristic::H2 => 0.5 * (a0 + self.gamma()?),
            Heuristic::H3 => 0.5 * (a0.max(self.beta()) + self.gamma()?),
            Heuristic::H4 => self.gamma()?,
        };
        Ok(v.max(a0))
    }
}
