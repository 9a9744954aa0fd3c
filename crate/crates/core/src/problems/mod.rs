//! Benchmark objectives: ridge regression, the anisotropic bowl, smoothed
//! basis pursuit denoising, and a synthetic conditioned quadratic, together
//! with a sampling certifier for the declared (mu, L) constants.
//!
//! Generators are pure functions of (spec, seed); identical inputs produce
//! bit-identical matrices.

mod bowl;
mod bpdn;
mod certify;
mod quadratic;
mod ridge;

pub use bowl::{BowlObjective, BowlSpec};
pub use bpdn::{bpdn_build, huber_value_grad, BpdnObjective, BpdnProblem, BpdnSpec};
pub use certify::{scvx_lipschitz_certify, CertifyReport, LipOverride};
pub use quadratic::{quad_build, QuadProblem, QuadSpec};
pub use ridge::{ridge_build, ridge_value_grad, RidgeObjective, RidgeProblem, RidgeSpec};

/// A strongly convex objective with Lipschitz-continuous gradient.
///
/// `mu` is a lower bound on the strong-convexity parameter and `lip` an
/// upper bound on the gradient's Lipschitz constant; the solvers are only
/// correct when both bounds hold, which `scvx_lipschitz_certify` spot-checks.
pub trait Objective {
    fn dim(&self) -> usize;
    fn mu(&self) -> f64;
    fn lip(&self) -> f64;

    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Value and gradient together; override when they share work.
    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }

    /// Radius of the ball constraint, for constrained problems.
    fn feasible_radius(&self) -> Option<f64> {
        None
    }

    /// Reciprocal condition number `mu / L`.
    fn rho(&self) -> f64 {
        self.mu() / self.lip()
    }
}

/// One of the built benchmark problems, bundling the objective with
/// whatever reference data its generator produced.
pub enum BuiltProblem {
    Ridge(RidgeProblem),
    Bowl(BowlObjective),
    Bpdn(BpdnProblem),
    Quad(QuadProblem),
}

impl BuiltProblem {
    pub fn objective(&self) -> &dyn Objective {
        match self {
            BuiltProblem::Ridge(p) => &p.objective,
            BuiltProblem::Bowl(o) => o,
            BuiltProblem::Bpdn(p) => &p.objective,
            BuiltProblem::Quad(p) => &p.objective,
        }
    }

    /// Stable identifier used as a cache key component.
    pub fn key(&self) -> String {
        match self {
            BuiltProblem::Ridge(p) => p.spec.key(),
            BuiltProblem::Bowl(o) => o.key(),
            BuiltProblem::Bpdn(p) => p.spec.key(),
            BuiltProblem::Quad(p) => p.spec.key(),
        }
    }

    /// The paper's starting point for each problem: the bowl starts on the
    /// constraint boundary at `(tau/sqrt(n)) * 1`, everything else at zero.
    pub fn start_point(&self) -> Vec<f64> {
        match self {
            BuiltProblem::Bowl(o) => {
                let c = o.tau() / (o.dim() as f64).sqrt();
                vec![c; o.dim()]
            }
            _ => vec![0.0; self.objective().dim()],
        }
    }
}
