//! Adaptive-step variant of the constant-step scheme.
//!
//! Each iteration advances the estimate-sequence center, forms the
//! feasibility cubic from `D_k = mu^2 ||x_k - v_k||^2 / ||f'(y_{k-1})||^2`,
//! and proposes a trial step `alpha >= sqrt(rho)` with one of the four
//! selection heuristics. The trial is accepted when the gradient actually
//! measured at the trial extrapolation point satisfies
//!
//! ```text
//! (alpha^2 - rho) ||f'(y~)||^2  <=  mu^2 ||x - v||^2 alpha (1-alpha)/(1+alpha)
//! ```
//!
//! which is exactly the condition keeping `f(x_{k+1}) <= phi*_{k+1}`.
//! Otherwise the iteration falls back to `alpha = sqrt(rho)`, recomputing
//! the extrapolation point and its gradient — the second of the at most two
//! gradient evaluations an iteration can spend.

use crate::cubic::{CubicParams, Heuristic};
use crate::error::{Error, Result};
use crate::problems::Objective;
use crate::solvers::{
    advance_center, extrapolate, maybe_project, IterState, SolverConfig, SolverRun, Telemetry,
    ALPHA_CEILING,
};
use crate::vecops;

/// The acceptance test for a trial step. `mu_xv_sq = mu^2 ||x - v||^2`.
///
/// At `alpha = sqrt(rho)` the left side is zero, so the fallback step always
/// validates; at `alpha -> 1` the right side vanishes, so no step that close
/// can validate unless the trial gradient is zero.
pub fn validation_holds(alpha: f64, rho: f64, grad_trial_sq: f64, mu_xv_sq: f64) -> bool {
    let lhs = (alpha * alpha - rho) * grad_trial_sq;
    let rhs = mu_xv_sq * alpha * (1.0 - alpha) / (1.0 + alpha);
    lhs <= rhs
}

/// One adaptive iteration from `state` (holding `x_k`, `v_{k-1}`, `y_{k-1}`,
/// `alpha_{k-1}`, and the cached `f'(y_{k-1})`). Returns the advanced state,
/// whether the fallback path ran, and the gradient evaluations spent (1 or 2).
pub fn adaptive_iteration(
    obj: &dyn Objective,
    state: &IterState,
    heuristic: Heuristic,
) -> Result<(IterState, bool, usize)> {
    let mu = obj.mu();
    let rho = obj.rho();
    let sqrt_rho = rho.sqrt();
    let inv_l = 1.0 / obj.lip();

    if !(state.grad_y_norm > 0.0) {
        return Err(Error::InvalidParameter(
            "adaptive iteration needs a nonzero previous gradient; caller should have stopped"
                .into(),
        ));
    }

    // v_k from the cached previous gradient
    let v = advance_center(&state.v, &state.y, &state.grad_y, state.alpha, mu)?;
    let x_minus_v = vecops::sub(&state.x, &v)?;
    let xv_sq = vecops::norm2_sq(&x_minus_v);
    let mu_xv_sq = mu * mu * xv_sq;
    let d = mu_xv_sq / (state.grad_y_norm * state.grad_y_norm);
    if !d.is_finite() {
        return Err(Error::Numerical(format!("non-finite D_k = {d}")));
    }

    let floor = sqrt_rho.min(ALPHA_CEILING); // rho = 1 pins both ends to the ceiling
    let alpha_trial = CubicParams::new(rho, d)?
        .propose_alpha(heuristic)?
        .clamp(floor, ALPHA_CEILING);

    let y_trial = extrapolate(&state.x, &v, alpha_trial)?;
    let g_trial = obj.gradient(&y_trial);
    if !vecops::all_finite(&g_trial) {
        return Err(Error::Numerical("non-finite gradient at trial point".into()));
    }

    // a trial at sqrt(rho) is valid by construction; checking it in floating
    // point would turn on the sign of the rounding in alpha^2 - rho
    let accept = alpha_trial <= sqrt_rho
        || validation_holds(alpha_trial, rho, vecops::norm2_sq(&g_trial), mu_xv_sq);
    let (alpha, y, g, fallback, calls) = if accept {
        (alpha_trial, y_trial, g_trial, false, 1)
    } else {
        // the trial point differs from the fallback extrapolation, so its
        // gradient cannot be reused
        let y_fb = extrapolate(&state.x, &v, sqrt_rho)?;
        let g_fb = obj.gradient(&y_fb);
        if !vecops::all_finite(&g_fb) {
            return Err(Error::Numerical("non-finite gradient at fallback point".into()));
        }
        (sqrt_rho, y_fb, g_fb, true, 2)
    };

    let x_next = maybe_project(obj, vecops::axpby(1.0, &y, -inv_l, &g)?);
    if !vecops::all_finite(&x_next) {
        return Err(Error::Numerical("non-finite iterate".into()));
    }
    let grad_norm = vecops::norm2(&g);
    Ok((
        IterState { x: x_next, v, y, alpha, grad_y: g, grad_y_norm: grad_norm },
        fallback,
        calls,
    ))
}

/// Runs the adaptive scheme. `cfg.heuristic` selects the trial-step rule;
/// gradient spend per iteration is 1 (trial accepted) or 2 (fallback).
pub fn nesterov_adaptive(obj: &dyn Objective, x0: &[f64], cfg: &SolverConfig) -> Result<SolverRun> {
    cfg.validate(obj, x0)?;
    let heuristic = cfg.heuristic.ok_or_else(|| {
        Error::InvalidParameter("adaptive solver needs cfg.heuristic".into())
    })?;
    let sqrt_rho = obj.rho().sqrt();
    let inv_l = 1.0 / obj.lip();

    let mut telem = Telemetry::new(obj, cfg);
    telem.init_tracking(cfg, x0);

    telem.watch.start();
    let g0 = obj.gradient(x0);
    let mut calls = 1usize;
    telem.watch.stop();
    if !vecops::all_finite(&g0) {
        return Err(telem.diverged("gradient", 0));
    }
    let g0_norm = vecops::norm2(&g0);
    telem.record(0, 0, sqrt_rho, false, x0);

    let mut state = IterState {
        x: x0.to_vec(),
        v: x0.to_vec(),
        y: x0.to_vec(),
        alpha: sqrt_rho,
        grad_y: g0,
        grad_y_norm: g0_norm,
    };
    if g0_norm <= cfg.tol_grad {
        return Ok(telem.finish(state, calls, true));
    }

    // opening step: x_1 = y_0 - (1/L) f'(y_0), consuming the initial gradient
    telem.watch.start();
    state.x = maybe_project(obj, vecops::axpby(1.0, &state.y, -inv_l, &state.grad_y)?);
    telem.watch.stop();
    if !vecops::all_finite(&state.x) {
        return Err(telem.diverged("iterate", 1));
    }
    telem.track_step(1, sqrt_rho, &state.y, &state.grad_y, &state.x);
    telem.record(1, calls, sqrt_rho, false, &state.x);

    let mut k = 1usize;
    // an iteration may need two evaluations; only start one that fits
    while state.grad_y_norm > cfg.tol_grad && calls + 2 <= cfg.max_grad_calls {
        telem.watch.start();
        let step = adaptive_iteration(obj, &state, heuristic);
        telem.watch.stop();
        let (next, fallback, spent) = match step {
            Ok(v) => v,
            Err(Error::Numerical(what)) => return Err(telem.diverged(&what, k + 1)),
            Err(e) => return Err(e),
        };
        state = next;
        calls += spent;
        k += 1;
        telem.track_step(k, state.alpha, &state.y, &state.grad_y, &state.x);
        telem.record(k, calls, state.alpha, fallback, &state.x);
    }

    let converged = state.grad_y_norm <= cfg.tol_grad;
    Ok(telem.finish(state, calls, converged))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct IsoQuadratic {
        n: usize,
    }

    impl Objective for IsoQuadratic {
        fn dim(&self) -> usize {
            self.n
        }
        fn mu(&self) -> f64 {
            1.0
        }
        fn lip(&self) -> f64 {
            1.0
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * vecops::norm2_sq(x)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.to_vec()
        }
    }

    struct DiagQuadratic {
        diag: Vec<f64>,
    }

    impl Objective for DiagQuadratic {
        fn dim(&self) -> usize {
            self.diag.len()
        }
        fn mu(&self) -> f64 {
            self.diag.iter().cloned().fold(f64::INFINITY, f64::min)
        }
        fn lip(&self) -> f64 {
            self.diag.iter().cloned().fold(0.0, f64::max)
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * x.iter().zip(&self.diag).map(|(v, d)| d * v * v).sum::<f64>()
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.iter().zip(&self.diag).map(|(v, d)| d * v).collect()
        }
    }

    #[test]
    fn validation_at_sqrt_rho_always_passes() {
        // rho values whose square root is exact in binary, so alpha^2 - rho
        // is exactly zero; inexact roots are why the solver accepts
        // alpha = sqrt(rho) without consulting this predicate
        for (rho, g_sq, xv) in [(0.25f64, 5.0, 0.0), (0.0625, 123.4, 7.0), (1.0, 1.0, 1.0)] {
            assert!(validation_holds(rho.sqrt(), rho, g_sq, xv));
        }
    }

    #[test]
    fn validation_near_one_fails_with_nonzero_gradient() {
        // right side vanishes at alpha -> 1; left side stays positive
        assert!(!validation_holds(1.0 - 1e-12, 0.25, 1.0, 1.0));
    }

    #[test]
    fn coincident_x_and_v_proposes_sqrt_rho_without_fallback() {
        // dyadic values chosen so the center update cancels exactly:
        // with alpha = 0.5, mu = 0.5, v = y = [2.5, -3], g = [1, -2] the
        // advanced center is [1.5, -1] bitwise, equal to x, forcing D_k = 0
        let obj = DiagQuadratic { diag: vec![0.5, 5.0] };
        let g = vec![1.0, -2.0];
        let state = IterState {
            x: vec![1.5, -1.0],
            v: vec![2.5, -3.0],
            y: vec![2.5, -3.0],
            alpha: 0.5,
            grad_y_norm: vecops::norm2(&g),
            grad_y: g,
        };
        let sqrt_rho = obj.rho().sqrt();
        for h in Heuristic::ALL {
            let (next, fallback, calls) = adaptive_iteration(&obj, &state, h).unwrap();
            assert!(!fallback, "{h:?} fell back");
            assert_eq!(calls, 1);
            assert_eq!(next.alpha, sqrt_rho, "{h:?} proposed {}", next.alpha);
        }
    }

    #[test]
    fn iso_quadratic_converges_like_const_step() {
        let obj = IsoQuadratic { n: 5 };
        let mut cfg = SolverConfig::new(1e-12, 100);
        cfg.heuristic = Some(Heuristic::H1);
        let run = nesterov_adaptive(&obj, &[2.0, -1.0, 0.5, 3.0, -2.0], &cfg).unwrap();
        assert!(run.converged);
        // the opening step already lands on the minimizer
        assert!(vecops::norm2(&run.state.x) < 1e-14);
        assert!(run.trace.len() <= 3);
    }

    #[test]
    fn per_iteration_spend_is_one_or_two_and_alpha_at_least_sqrt_rho() {
        let obj = DiagQuadratic { diag: (1..=40).map(|i| i as f64).collect() };
        let sqrt_rho = obj.rho().sqrt();
        for h in Heuristic::ALL {
            let mut cfg = SolverConfig::new(1e-10, 4000);
            cfg.heuristic = Some(h);
            let run = nesterov_adaptive(&obj, &vec![1.0; 40], &cfg).unwrap();
            assert!(run.converged, "{h:?} did not converge");
            for w in run.trace.windows(2) {
                let inc = w[1].grad_calls - w[0].grad_calls;
                assert!(inc == 1 || inc == 2, "{h:?}: increment {inc}");
            }
            for r in &run.trace {
                assert!(r.alpha >= sqrt_rho * (1.0 - 1e-15), "{h:?}: alpha {}", r.alpha);
                assert!(r.alpha < 1.0);
            }
        }
    }

    #[test]
    fn adaptive_beats_const_step_on_anisotropic_quadratic() {
        use crate::solvers::nesterov_const_step;
        let obj = DiagQuadratic { diag: (1..=60).map(|i| (i * i) as f64).collect() };
        let x0 = vec![1.0; 60];
        let mut cfg = SolverConfig::new(1e-9, 20_000);
        cfg.heuristic = Some(Heuristic::H1);
        let adaptive = nesterov_adaptive(&obj, &x0, &cfg).unwrap();
        let plain = nesterov_const_step(&obj, &x0, &cfg).unwrap();
        assert!(adaptive.converged && plain.converged);
        assert!(
            adaptive.grad_calls < plain.grad_calls,
            "adaptive {} vs const {}",
            adaptive.grad_calls,
            plain.grad_calls
        );
    }

    #[test]
    fn requires_heuristic() {
        let obj = IsoQuadratic { n: 2 };
        let err = nesterov_adaptive(&obj, &[1.0, 1.0], &SolverConfig::new(1e-9, 10)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
