//! Sampling certifier for membership in the declared smoothness class.
//!
//! Checks the two defining inequalities on sampled pairs from the feasible
//! region (the constraint ball when present, otherwise a box of radius 10):
//!
//! ```text
//! ||f'(x) - f'(y)||  <=  L ||x - y||                     (Lipschitz gradient)
//! f(y)  >=  f(x) + <f'(x), y - x> + (mu/2) ||y - x||^2   (strong convexity)
//! ```
//!
//! Uniform pairs rarely align with the stiffest curvature direction — on the
//! ridge problem a random direction sees roughly a third of the true
//! Lipschitz constant — so an under-declared L would sail through purely
//! random sampling. The certifier therefore also runs a curvature probe:
//! power iteration on the Hessian action approximated by gradient
//! differences, and checks the pair aligned with the worst direction found.

use crate::problems::Objective;
use crate::rng::SplitMix64;
use crate::vecops;

/// Relative slack granted to both inequalities before a pair counts as a
/// violation.
pub const CERTIFY_SLACK: f64 = 1e-9;

const PROBE_ITERS: usize = 80;

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub samples: usize,
    pub lip_violations: usize,
    pub scvx_violations: usize,
    /// Worst `(||dg|| - L ||dx||) / (L ||dx||)` over all pairs; negative
    /// means the Lipschitz bound held everywhere.
    pub worst_lip_margin: f64,
    /// Worst `(rhs - f(y)) / scale` for the strong-convexity inequality;
    /// negative means it held everywhere.
    pub worst_scvx_margin: f64,
}

impl CertifyReport {
    pub fn ok(&self) -> bool {
        self.lip_violations == 0 && self.scvx_violations == 0
    }
}

/// Overrides the declared Lipschitz constant of an objective. Exists so
/// negative controls can check that the certifier flags a bad declaration.
pub struct LipOverride<'a> {
    pub inner: &'a dyn Objective,
    pub lip: f64,
}

impl Objective for LipOverride<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn mu(&self) -> f64 {
        self.inner.mu()
    }
    fn lip(&self) -> f64 {
        self.lip
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.inner.gradient(x)
    }
    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.inner.value_grad(x)
    }
    fn feasible_radius(&self) -> Option<f64> {
        self.inner.feasible_radius()
    }
}

fn sample_point(obj: &dyn Objective, rng: &mut SplitMix64, shrink: f64) -> Vec<f64> {
    let n = obj.dim();
    match obj.feasible_radius() {
        Some(r) => {
            // uniform in the ball: gaussian direction, radius ~ r * u^(1/n)
            let mut x = rng.normal_vec(n);
            let norm = vecops::norm2(&x);
            let radius = r * shrink * rng.next_f64().powf(1.0 / n as f64);
            let c = if norm > 0.0 { radius / norm } else { 0.0 };
            x.iter_mut().for_each(|v| *v *= c);
            x
        }
        None => (0..n).map(|_| (rng.next_f64() * 2.0 - 1.0) * 10.0 * shrink).collect(),
    }
}

/// Verifies both class inequalities on `samples` random pairs plus one
/// curvature-aligned pair, all inside the feasible region. Returns the
/// violation counts and worst margins.
pub fn scvx_lipschitz_certify(obj: &dyn Objective, samples: usize, seed: u64) -> CertifyReport {
    let mut rng = SplitMix64::stream(seed, 0xce);
    let lip = obj.lip();
    let mu = obj.mu();

    let mut report = CertifyReport {
        samples: 0,
        lip_violations: 0,
        scvx_violations: 0,
        worst_lip_margin: f64::NEG_INFINITY,
        worst_scvx_margin: f64::NEG_INFINITY,
    };

    let check_pair = |x: &[f64], y: &[f64], report: &mut CertifyReport| {
        let (fx, gx) = obj.value_grad(x);
        let (fy, gy) = obj.value_grad(y);
        let dx = vecops::sub(y, x).expect("dim");
        let dist = vecops::norm2(&dx);
        if dist == 0.0 {
            return;
        }
        report.samples += 1;

        let dg = vecops::norm2(&vecops::sub(&gy, &gx).expect("dim"));
        let lip_margin = (dg - lip * dist) / (lip * dist);
        report.worst_lip_margin = report.worst_lip_margin.max(lip_margin);
        if lip_margin > CERTIFY_SLACK {
            report.lip_violations += 1;
        }

        let rhs = fx + vecops::dot(&gx, &dx).expect("dim") + 0.5 * mu * dist * dist;
        let scale = fy.abs().max(rhs.abs()).max(1.0);
        let scvx_margin = (rhs - fy) / scale;
        report.worst_scvx_margin = report.worst_scvx_margin.max(scvx_margin);
        if scvx_margin > CERTIFY_SLACK {
            report.scvx_violations += 1;
        }
    };

    for _ in 0..samples {
        let x = sample_point(obj, &mut rng, 0.999);
        let y = sample_point(obj, &mut rng, 0.999);
        check_pair(&x, &y, &mut report);
    }

    // Curvature probe: find the stiffest direction by power iteration on
    // d -> (f'(base + eps d) - f'(base)) / eps and test that pair too.
    let base = sample_point(obj, &mut rng, 0.5);
    let eps = match obj.feasible_radius() {
        Some(r) => 1e-4 * r,
        None => 1e-5 * (1.0 + vecops::norm2(&base)),
    };
    let g_base = obj.gradient(&base);
    let mut dir = {
        let d = rng.normal_vec(obj.dim());
        let n = vecops::norm2(&d);
        vecops::scale(1.0 / n, &d)
    };
    for _ in 0..PROBE_ITERS {
        let probe = vecops::axpby(1.0, &base, eps, &dir).expect("dim");
        let hd = vecops::sub(&obj.gradient(&probe), &g_base).expect("dim");
        let norm = vecops::norm2(&hd);
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        dir = vecops::scale(1.0 / norm, &hd);
    }
    let probe = vecops::axpby(1.0, &base, eps, &dir).expect("dim");
    check_pair(&base, &probe, &mut report);

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{bpdn_build, ridge_build, BowlSpec, BpdnSpec, RidgeSpec};

    /// The equality case: f = (mu/2)||x||^2 has mu = L.
    struct IsoQuadratic {
        n: usize,
        mu: f64,
    }

    impl Objective for IsoQuadratic {
        fn dim(&self) -> usize {
            self.n
        }
        fn mu(&self) -> f64 {
            self.mu
        }
        fn lip(&self) -> f64 {
            self.mu
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * self.mu * vecops::norm2_sq(x)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vecops::scale(self.mu, x)
        }
    }

    #[test]
    fn iso_quadratic_certifies_with_equality() {
        let obj = IsoQuadratic { n: 10, mu: 2.5 };
        let report = scvx_lipschitz_certify(&obj, 500, 1);
        assert!(report.ok(), "{report:?}");
        // both inequalities are equalities for this objective
        assert!(report.worst_lip_margin.abs() < 1e-9, "{report:?}");
        assert!(report.worst_scvx_margin.abs() < 1e-9, "{report:?}");
    }

    #[test]
    fn small_ridge_certifies() {
        let p = ridge_build(&RidgeSpec {
            m: 20,
            n: 35,
            lambda: 1.0,
            sigma_max: 10.0,
            sigma_min: 1.0,
            seed: 3,
        })
        .unwrap();
        let report = scvx_lipschitz_certify(&p.objective, 1000, 2);
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn small_bowl_certifies() {
        let bowl = BowlSpec { n: 30, tau_ball: 2.0 }.build().unwrap();
        let report = scvx_lipschitz_certify(&bowl, 1000, 3);
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn small_bpdn_certifies() {
        let p = bpdn_build(&BpdnSpec {
            m: 20,
            n: 40,
            lambda: 0.05,
            tau_huber: 1e-3,
            sigma_scvx: 0.05,
            nnz: 4,
            noise_level: 0.01,
            seed: 4,
        })
        .unwrap();
        let report = scvx_lipschitz_certify(&p.objective, 1000, 5);
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn halved_lip_is_flagged() {
        let p = ridge_build(&RidgeSpec {
            m: 20,
            n: 35,
            lambda: 1.0,
            sigma_max: 10.0,
            sigma_min: 1.0,
            seed: 3,
        })
        .unwrap();
        let bad = LipOverride { inner: &p.objective, lip: p.objective.lip() / 2.0 };
        let report = scvx_lipschitz_certify(&bad, 200, 6);
        assert!(report.lip_violations > 0, "{report:?}");
        assert!(!report.ok());
    }
}
