//! Accelerated first-order methods for strongly convex objectives with
//! Lipschitz-continuous gradient, with the instrumentation needed to verify
//! the estimate-sequence machinery they rest on.
//!
//! The crate provides:
//!
//! - [`solvers`]: the constant-step scheme, a restartable momentum scheme,
//!   and the adaptive-step variant that searches for a per-iteration step
//!   parameter above `sqrt(mu/L)` at a cost of at most two gradient
//!   evaluations per iteration.
//! - [`problems`]: seeded generators for the benchmark objectives (ridge
//!   regression, an anisotropic bowl with a ball constraint, smoothed basis
//!   pursuit denoising, and a conditioned quadratic) plus a sampling
//!   certifier for the declared curvature constants.
//! - [`reference`]: CGLS on the normal equations and per-problem reference
//!   solutions with a certified disk cache.
//! - [`cubic`]: analysis of the feasibility cubic behind the adaptive step.

pub mod cubic;
pub mod error;
pub mod io;
pub mod matrix;
pub mod problems;
pub mod reference;
pub mod rng;
pub mod solvers;
pub mod vecops;

pub use error::{Error, Result};
