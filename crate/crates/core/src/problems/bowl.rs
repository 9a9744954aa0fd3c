//! The anisotropic bowl: `f(x) = sum_i i * x_i^4 + 1/2 ||x||^2` over the
//! ball `||x|| <= tau`.
//!
//! The quartic term has unbounded curvature on all of R^n; the ball
//! constraint caps it, giving `L = 12 n tau^2 + 1` on the feasible region
//! while `mu = 1` comes from the quadratic term. Local curvature near the
//! minimizer (the origin) is far below `L`, which is exactly what the
//! problem is designed to exercise.

use crate::error::{Error, Result};
use crate::problems::Objective;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowlSpec {
    pub n: usize,
    pub tau_ball: f64,
}

impl BowlSpec {
    /// The paper configuration: n = 500, tau = 4, so L = 96001 and mu = 1.
    pub fn paper() -> Self {
        Self { n: 500, tau_ball: 4.0 }
    }

    pub fn build(&self) -> Result<BowlObjective> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("bowl needs n >= 1".into()));
        }
        if !(self.tau_ball > 0.0) {
            return Err(Error::InvalidParameter("bowl needs tau > 0".into()));
        }
        Ok(BowlObjective { n: self.n, tau: self.tau_ball })
    }
}

#[derive(Debug, Clone)]
pub struct BowlObjective {
    n: usize,
    tau: f64,
}

impl BowlObjective {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn key(&self) -> String {
        format!("bowl-n{}-tau{}", self.n, self.tau)
    }
}

impl Objective for BowlObjective {
    fn dim(&self) -> usize {
        self.n
    }

    fn mu(&self) -> f64 {
        1.0
    }

    fn lip(&self) -> f64 {
        12.0 * self.n as f64 * self.tau * self.tau + 1.0
    }

    fn feasible_radius(&self) -> Option<f64> {
        Some(self.tau)
    }

    fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let sq = v * v;
                (i + 1) as f64 * sq * sq + 0.5 * sq
            })
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        x.iter()
            .enumerate()
            .map(|(i, &v)| 4.0 * (i + 1) as f64 * v * v * v + v)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::vecops;

    #[test]
    fn origin_is_the_minimizer() {
        let bowl = BowlSpec { n: 7, tau_ball: 2.0 }.build().unwrap();
        let x0 = vec![0.0; 7];
        assert_eq!(bowl.value(&x0), 0.0);
        assert_eq!(bowl.gradient(&x0), vec![0.0; 7]);
    }

    #[test]
    fn paper_constants() {
        let bowl = BowlSpec::paper().build().unwrap();
        assert_eq!(bowl.lip(), 96001.0);
        assert_eq!(bowl.mu(), 1.0);
        assert_eq!(bowl.feasible_radius(), Some(4.0));
    }

    #[test]
    fn scalar_case() {
        let bowl = BowlSpec { n: 1, tau_ball: 3.0 }.build().unwrap();
        assert!((bowl.value(&[1.0]) - 1.5).abs() < 1e-15);
        assert!((bowl.gradient(&[1.0])[0] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn finite_differences_match_gradient() {
        let bowl = BowlSpec { n: 20, tau_ball: 2.0 }.build().unwrap();
        let mut rng = SplitMix64::new(55);
        let mut x = rng.normal_vec(20);
        let nx = vecops::norm2(&x);
        x.iter_mut().for_each(|v| *v *= 1.5 / nx); // inside the ball
        let g = bowl.gradient(&x);
        let h = 1e-6;
        for _ in 0..5 {
            let mut d = rng.normal_vec(20);
            let nd = vecops::norm2(&d);
            d.iter_mut().for_each(|v| *v /= nd);
            let xp = vecops::axpby(1.0, &x, h, &d).unwrap();
            let xm = vecops::axpby(1.0, &x, -h, &d).unwrap();
            let fd = (bowl.value(&xp) - bowl.value(&xm)) / (2.0 * h);
            let an = vecops::dot(&g, &d).unwrap();
            assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "fd {fd} vs {an}");
        }
    }
}
