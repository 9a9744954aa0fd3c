//! Smoothed basis pursuit denoising:
//! `f(x) = 1/2 ||Ax - b||^2 + lambda * huber_tau(x) + (sigma/2) ||x||^2`.
//!
//! The Huber penalty with half-width tau smooths the l1 norm (quadratic
//! inside `|t| < tau`, linear outside), contributing `lambda / tau` to the
//! gradient's Lipschitz constant; the sigma term supplies the strong
//! convexity that the plain problem lacks. `sigma_scvx` is the weight the
//! source problem writes as rho — renamed here because rho is already taken
//! by the reciprocal condition number.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problems::Objective;
use crate::rng::SplitMix64;
use crate::vecops;

#[derive(Debug, Clone, PartialEq)]
pub struct BpdnSpec {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub tau_huber: f64,
    pub sigma_scvx: f64,
    /// Number of nonzeros in the planted signal.
    pub nnz: usize,
    /// Noise scale relative to `||A x_true|| / sqrt(m)`.
    pub noise_level: f64,
    pub seed: u64,
}

impl BpdnSpec {
    /// The experiment configuration: 800 x 2000, lambda = 0.05, tau = 1e-4,
    /// sigma = 0.05, 40-sparse signal, 1% noise (so mu = 0.05, L ~ 502.7).
    pub fn paper(seed: u64) -> Self {
        Self {
            m: 800,
            n: 2000,
            lambda: 0.05,
            tau_huber: 1e-4,
            sigma_scvx: 0.05,
            nnz: 40,
            noise_level: 0.01,
            seed,
        }
    }

    pub fn key(&self) -> String {
        format!(
            "bpdn-m{}-n{}-l{}-t{}-s{}-nnz{}-noise{}-seed{}",
            self.m,
            self.n,
            self.lambda,
            self.tau_huber,
            self.sigma_scvx,
            self.nnz,
            self.noise_level,
            self.seed
        )
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("bpdn needs m, n >= 1".into()));
        }
        if !(self.lambda > 0.0 && self.tau_huber > 0.0 && self.sigma_scvx > 0.0) {
            return Err(Error::InvalidParameter(
                "bpdn needs lambda, tau_huber, sigma_scvx > 0".into(),
            ));
        }
        if self.nnz > self.n {
            return Err(Error::InvalidParameter(format!(
                "bpdn nnz = {} exceeds n = {}",
                self.nnz, self.n
            )));
        }
        if !(self.noise_level >= 0.0) {
            return Err(Error::InvalidParameter("bpdn noise_level must be >= 0".into()));
        }
        Ok(())
    }
}

/// Scalar Huber penalty and derivative with half-width `tau`.
#[inline]
fn huber_scalar(tau: f64, t: f64) -> (f64, f64) {
    if t.abs() >= tau {
        (t.abs() - 0.5 * tau, t.signum())
    } else {
        (t * t / (2.0 * tau), t / tau)
    }
}

/// Elementwise Huber penalty: total value and gradient.
pub fn huber_value_grad(tau_huber: f64, x: &[f64]) -> (f64, Vec<f64>) {
    debug_assert!(tau_huber > 0.0);
    let mut value = 0.0;
    let grad = x
        .iter()
        .map(|&t| {
            let (v, g) = huber_scalar(tau_huber, t);
            value += v;
            g
        })
        .collect();
    (value, grad)
}

pub struct BpdnObjective {
    a: DenseMatrix,
    b: Vec<f64>,
    lambda: f64,
    tau_huber: f64,
    sigma: f64,
    lip: f64,
}

impl BpdnObjective {
    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl Objective for BpdnObjective {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn mu(&self) -> f64 {
        self.sigma
    }

    fn lip(&self) -> f64 {
        self.lip
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_grad(x).0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_grad(x).1
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let r = vecops::sub(&self.a.matvec(x).expect("dim"), &self.b).expect("dim");
        let (hv, hg) = huber_value_grad(self.tau_huber, x);
        let value =
            0.5 * vecops::norm2_sq(&r) + self.lambda * hv + 0.5 * self.sigma * vecops::norm2_sq(x);
        let atr = self.a.matvec_t(&r).expect("dim");
        let grad = atr
            .iter()
            .zip(&hg)
            .zip(x)
            .map(|((t, h), xi)| t + self.lambda * h + self.sigma * xi)
            .collect();
        (value, grad)
    }
}

pub struct BpdnProblem {
    pub spec: BpdnSpec,
    pub objective: BpdnObjective,
    /// The planted sparse signal.
    pub x_true: Vec<f64>,
}

/// Builds the seeded smooth-BPDN instance: `A = randn(m,n)/sqrt(n)`, a
/// `nnz`-sparse sign signal, and `b = A x_true + e` with Gaussian noise
/// scaled to `noise_level * ||A x_true|| / sqrt(m)` per component.
pub fn bpdn_build(spec: &BpdnSpec) -> Result<BpdnProblem> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);

    let mut a = DenseMatrix::gaussian(m, n, &mut SplitMix64::stream(spec.seed, 1));
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    {
        // scale in place
        let data = a.data().to_vec();
        a = DenseMatrix::from_data(m, n, data.iter().map(|v| v * inv_sqrt_n).collect())?;
    }

    let mut support_rng = SplitMix64::stream(spec.seed, 2);
    let mut x_true = vec![0.0; n];
    let mut placed = 0;
    while placed < spec.nnz {
        let idx = support_rng.next_index(n);
        if x_true[idx] == 0.0 {
            x_true[idx] = if support_rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            placed += 1;
        }
    }

    let clean = a.matvec(&x_true)?;
    let noise_scale = spec.noise_level * vecops::norm2(&clean) / (m as f64).sqrt();
    let mut noise_rng = SplitMix64::stream(spec.seed, 3);
    let b: Vec<f64> = clean.iter().map(|c| c + noise_scale * noise_rng.next_normal()).collect();

    let gram = |v: &[f64]| {
        let t = a.matvec_t(v).expect("dim");
        a.matvec(&t).expect("dim")
    };
    let est = vecops::power_method_sq_norm(
        gram,
        m,
        vecops::POWER_METHOD_ITERS,
        vecops::POWER_METHOD_TOL,
        spec.seed,
    )?;
    let lip = vecops::SPECTRAL_INFLATION * est + spec.lambda / spec.tau_huber + spec.sigma_scvx;

    Ok(BpdnProblem {
        spec: spec.clone(),
        objective: BpdnObjective {
            a,
            b,
            lambda: spec.lambda,
            tau_huber: spec.tau_huber,
            sigma: spec.sigma_scvx,
            lip,
        },
        x_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> BpdnSpec {
        BpdnSpec {
            m: 25,
            n: 60,
            lambda: 0.05,
            tau_huber: 1e-3,
            sigma_scvx: 0.05,
            nnz: 5,
            noise_level: 0.01,
            seed: 13,
        }
    }

    #[test]
    fn huber_at_zero() {
        let (v, g) = huber_value_grad(0.5, &[0.0, 0.0]);
        assert_eq!(v, 0.0);
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn huber_branches_agree_at_seam() {
        let tau = 0.3;
        for t in [tau, -tau] {
            // quadratic branch value at |t| = tau: t^2/(2 tau) = tau/2
            let quad_value = t * t / (2.0 * tau);
            let (v, g) = huber_scalar(tau, t);
            assert!((v - quad_value).abs() < 1e-15);
            assert!((v - (t.abs() - 0.5 * tau)).abs() < 1e-15);
            assert_eq!(g, t.signum());
            assert!((g - t / tau).abs() < 1e-15);
        }
    }

    #[test]
    fn huber_linear_branch() {
        let tau = 0.2;
        let (v, g) = huber_scalar(tau, 2.0 * tau);
        assert!((v - 1.5 * tau).abs() < 1e-15);
        assert_eq!(g, 1.0);
    }

    #[test]
    fn huber_continuous_across_seam() {
        let tau = 1e-4;
        let eps = tau * 1e-12;
        for sign in [1.0, -1.0] {
            let (v_in, g_in) = huber_scalar(tau, sign * (tau - eps));
            let (v_out, g_out) = huber_scalar(tau, sign * (tau + eps));
            assert!((v_in - v_out).abs() < 1e-15);
            assert!((g_in - g_out).abs() < 1e-11);
        }
    }

    #[test]
    fn gradient_at_zero_is_minus_atb() {
        let p = bpdn_build(&small_spec()).unwrap();
        let g = p.objective.gradient(&vec![0.0; 60]);
        let atb = p.objective.a().matvec_t(p.objective.b()).unwrap();
        for (gi, ai) in g.iter().zip(&atb) {
            assert!((gi + ai).abs() < 1e-12 * ai.abs().max(1.0));
        }
        let v = p.objective.value(&vec![0.0; 60]);
        let want = 0.5 * vecops::norm2_sq(p.objective.b());
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn pieces_sum_to_whole() {
        let p = bpdn_build(&small_spec()).unwrap();
        let mut rng = SplitMix64::new(3);
        let x = rng.normal_vec(60);
        let (v, g) = p.objective.value_grad(&x);
        let r = vecops::sub(&p.objective.a().matvec(&x).unwrap(), p.objective.b()).unwrap();
        let (hv, hg) = huber_value_grad(p.spec.tau_huber, &x);
        let want_v = 0.5 * vecops::norm2_sq(&r)
            + p.spec.lambda * hv
            + 0.5 * p.spec.sigma_scvx * vecops::norm2_sq(&x);
        assert!((v - want_v).abs() < 1e-12 * want_v.abs().max(1.0));
        let atr = p.objective.a().matvec_t(&r).unwrap();
        for i in 0..60 {
            let want = atr[i] + p.spec.lambda * hg[i] + p.spec.sigma_scvx * x[i];
            assert!((g[i] - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn sigma_term_alone() {
        // A = 0 (zero matrix) and lambda -> 0 limit isn't constructible via
        // the builder; check the formula directly: grad of (sigma/2)||x||^2
        let sigma = 0.7;
        let x = [1.0, -2.0];
        let g: Vec<f64> = x.iter().map(|v| sigma * v).collect();
        assert_eq!(g, vec![0.7, -1.4]);
    }

    #[test]
    fn finite_differences_away_from_seams() {
        let p = bpdn_build(&small_spec()).unwrap();
        let mut rng = SplitMix64::new(17);
        let tau = p.spec.tau_huber;
        let mut x = rng.normal_vec(60);
        // keep every coordinate clear of |x_i| = tau
        for v in x.iter_mut() {
            if (v.abs() - tau).abs() < 1e-2 {
                *v = v.signum() * (tau + 2e-2);
            }
        }
        let (_, g) = p.objective.value_grad(&x);
        let h = 1e-6 * vecops::norm2(&x).max(1.0);
        for _ in 0..5 {
            let mut d = rng.normal_vec(60);
            let nd = vecops::norm2(&d);
            d.iter_mut().for_each(|v| *v /= nd);
            let xp = vecops::axpby(1.0, &x, h, &d).unwrap();
            let xm = vecops::axpby(1.0, &x, -h, &d).unwrap();
            let fd = (p.objective.value(&xp) - p.objective.value(&xm)) / (2.0 * h);
            let an = vecops::dot(&g, &d).unwrap();
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                "fd {fd} vs analytic {an}"
            );
        }
    }

    #[test]
    fn planted_signal_has_requested_sparsity() {
        let p = bpdn_build(&small_spec()).unwrap();
        let nnz = p.x_true.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nnz, 5);
        assert!(p.x_true.iter().all(|v| *v == 0.0 || v.abs() == 1.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = bpdn_build(&small_spec()).unwrap();
        let b = bpdn_build(&small_spec()).unwrap();
        assert_eq!(a.objective.a(), b.objective.a());
        assert_eq!(a.objective.b(), b.objective.b());
        assert_eq!(a.x_true, b.x_true);
    }
}
