//! The constant-step scheme for strongly convex objectives: gradient step
//! from the extrapolated point, extrapolation with the fixed coefficient
//! `(1 - sqrt(rho)) / (1 + sqrt(rho))`, one gradient evaluation per
//! iteration.

use crate::error::Result;
use crate::problems::Objective;
use crate::solvers::{maybe_project, SolverConfig, SolverRun, Telemetry};
use crate::vecops;

use super::IterState;

/// Runs the constant-step scheme from `x0` until the gradient norm at the
/// extrapolation point drops to `cfg.tol_grad` or the gradient budget runs
/// out. Constrained objectives project each new iterate onto their ball.
pub fn nesterov_const_step(
    obj: &dyn Objective,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverRun> {
    run_momentum(obj, x0, cfg, Momentum::ConstStep)
}

pub(super) enum Momentum {
    /// Fixed coefficient from `rho = mu / L`.
    ConstStep,
    /// `t`-sequence momentum with optional periodic restart.
    Restarted,
}

/// Shared driver for the two fixed-schedule schemes; they differ only in
/// the momentum coefficient and the restart rule.
pub(super) fn run_momentum(
    obj: &dyn Objective,
    x0: &[f64],
    cfg: &SolverConfig,
    kind: Momentum,
) -> Result<SolverRun> {
    cfg.validate(obj, x0)?;
    let sqrt_rho = obj.rho().sqrt();
    let const_coeff = (1.0 - sqrt_rho) / (1.0 + sqrt_rho);
    let inv_l = 1.0 / obj.lip();
    let track = matches!(kind, Momentum::ConstStep);

    let mut telem = Telemetry::new(obj, cfg);
    if track {
        telem.init_tracking(cfg, x0);
    }

    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    // momentum state for the restarted scheme
    let mut t = 1.0f64;
    let mut since_restart = 0usize;

    telem.watch.start();
    let mut g = obj.gradient(&y);
    let mut calls = 1usize;
    telem.watch.stop();
    if !vecops::all_finite(&g) {
        return Err(telem.diverged("gradient", 0));
    }
    let mut grad_norm = vecops::norm2(&g);
    telem.record(0, 0, sqrt_rho, false, &x);

    let mut k = 0usize;
    while grad_norm > cfg.tol_grad && calls < cfg.max_grad_calls {
        telem.watch.start();
        let step = vecops::axpby(1.0, &y, -inv_l, &g)?;
        let x_next = maybe_project(obj, step);
        let coeff = match kind {
            Momentum::ConstStep => const_coeff,
            Momentum::Restarted => {
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                let c = (t - 1.0) / t_next;
                t = t_next;
                c
            }
        };
        let mut y_next = vecops::axpby(1.0 + coeff, &x_next, -coeff, &x)?;
        if let Momentum::Restarted = kind {
            since_restart += 1;
            if cfg.restart_period.is_some_and(|p| since_restart >= p) {
                t = 1.0;
                since_restart = 0;
                y_next = x_next.clone();
            }
        }
        telem.watch.stop();

        // estimate bookkeeping consumes the pre-update y and gradient
        telem.track_step(k + 1, sqrt_rho, &y, &g, &x_next);

        telem.watch.start();
        x = x_next;
        y = y_next;
        g = obj.gradient(&y);
        calls += 1;
        telem.watch.stop();

        k += 1;
        if !vecops::all_finite(&g) || !vecops::all_finite(&x) {
            return Err(telem.diverged("gradient", k));
        }
        grad_norm = vecops::norm2(&g);
        if !grad_norm.is_finite() {
            return Err(telem.diverged("gradient norm", k));
        }
        // row k consumed exactly the calls made before the lookahead gradient
        telem.record(k, calls - 1, sqrt_rho, false, &x);
    }

    let converged = grad_norm <= cfg.tol_grad;
    let state = final_state(&x, &y, &g, grad_norm, sqrt_rho, matches!(kind, Momentum::ConstStep));
    Ok(telem.finish(state, calls, converged))
}

fn final_state(
    x: &[f64],
    y: &[f64],
    g: &[f64],
    grad_norm: f64,
    sqrt_rho: f64,
    reconstruct_v: bool,
) -> IterState {
    // for the constant-step scheme the center satisfies
    // y = (x + a v) / (1 + a), so v is recoverable; the restarted scheme
    // has no center and reuses x
    let v = if reconstruct_v && sqrt_rho > 0.0 {
        vecops::axpby((1.0 + sqrt_rho) / sqrt_rho, y, -1.0 / sqrt_rho, x)
            .unwrap_or_else(|_| x.to_vec())
    } else {
        x.to_vec()
    };
    IterState {
        x: x.to_vec(),
        v,
        y: y.to_vec(),
        alpha: sqrt_rho,
        grad_y: g.to_vec(),
        grad_y_norm: grad_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::ReferencePoint;

    /// f = 1/2 ||x||^2: mu = L = 1, so rho = 1 and the very first step
    /// x_1 = y_0 - f'(y_0) lands exactly on the minimizer.
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

    #[test]
    fn iso_quadratic_converges_in_one_step() {
        let obj = IsoQuadratic { n: 6 };
        let x0 = vec![3.0, -1.0, 2.0, 0.5, -4.0, 1.0];
        let run = nesterov_const_step(&obj, &x0, &SolverConfig::new(1e-12, 100)).unwrap();
        assert!(run.converged);
        assert_eq!(run.trace.len(), 2); // x0 row plus the one step
        assert!(vecops::norm2(&run.state.x) < 1e-15);
        assert_eq!(run.grad_calls, 2); // f'(y_0) and the stopping check
    }

    #[test]
    fn immediate_return_when_already_converged() {
        let obj = IsoQuadratic { n: 3 };
        let x0 = vec![1e-15, 0.0, 0.0];
        let run = nesterov_const_step(&obj, &x0, &SolverConfig::new(1e-9, 100)).unwrap();
        assert!(run.converged);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace[0].grad_calls, 0);
        assert_eq!(run.state.x, x0);
    }

    #[test]
    fn gradient_budget_is_respected() {
        // anisotropic diagonal quadratic, slow enough not to converge
        struct Diag;
        impl Objective for Diag {
            fn dim(&self) -> usize {
                2
            }
            fn mu(&self) -> f64 {
                1.0
            }
            fn lip(&self) -> f64 {
                1000.0
            }
            fn value(&self, x: &[f64]) -> f64 {
                0.5 * (x[0] * x[0] + 1000.0 * x[1] * x[1])
            }
            fn gradient(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0], 1000.0 * x[1]]
            }
        }
        let run = nesterov_const_step(&Diag, &[1.0, 1.0], &SolverConfig::new(1e-14, 17)).unwrap();
        assert!(!run.converged);
        assert_eq!(run.grad_calls, 17);
        // every row consumes exactly one more call than the previous
        for w in run.trace.windows(2) {
            assert_eq!(w[1].grad_calls - w[0].grad_calls, 1);
        }
    }

    #[test]
    fn divergence_is_reported_with_trace() {
        // becomes non-finite once the iterate moves
        struct Poison;
        impl Objective for Poison {
            fn dim(&self) -> usize {
                1
            }
            fn mu(&self) -> f64 {
                1.0
            }
            fn lip(&self) -> f64 {
                2.0
            }
            fn value(&self, x: &[f64]) -> f64 {
                x[0]
            }
            fn gradient(&self, x: &[f64]) -> Vec<f64> {
                if x[0] == 5.0 {
                    vec![1.0]
                } else {
                    vec![f64::NAN]
                }
            }
        }
        let err = nesterov_const_step(&Poison, &[5.0], &SolverConfig::new(1e-9, 10)).unwrap_err();
        match err {
            crate::error::Error::Divergence { k, trace, .. } => {
                assert_eq!(k, 1);
                assert_eq!(trace.len(), 1);
            }
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn reference_telemetry_fills_gap_columns() {
        let obj = IsoQuadratic { n: 2 };
        let mut cfg = SolverConfig::new(1e-12, 50);
        cfg.reference = Some(ReferencePoint { x_ref: vec![0.0, 0.0], f_ref: 0.0 });
        let run = nesterov_const_step(&obj, &[1.0, 1.0], &cfg).unwrap();
        let first = &run.trace[0];
        assert!((first.f_gap.unwrap() - 1.0).abs() < 1e-15);
        assert!((first.x_err.unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        let last = run.trace.last().unwrap();
        assert!(last.f_gap.unwrap() < 1e-15);
    }
}
