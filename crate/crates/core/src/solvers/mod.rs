//! First-order solvers: the constant-step scheme for strongly convex
//! objectives, the momentum scheme with optional periodic restart, and the
//! adaptive-step variant that tries to beat the constant `sqrt(rho)` rate,
//! plus the estimate-sequence tracker that verifies the invariant
//! `f(x_k) <= phi*_k` justifying all of it.

mod adaptive;
mod const_step;
mod estimate;
mod restart;

pub use adaptive::{adaptive_iteration, nesterov_adaptive, validation_holds};
pub use const_step::nesterov_const_step;
pub use estimate::{advance_center, EstimateTracker};
pub use restart::nesterov_l_restart;

use std::time::Instant;

use crate::cubic::Heuristic;
use crate::error::{Error, Result};
use crate::problems::Objective;
use crate::vecops;

/// Trial steps are clamped strictly below 1: the validation inequality's
/// right side vanishes at alpha = 1, so 1 can never validate, and the
/// extrapolation formulas divide by 1 + alpha.
pub const ALPHA_CEILING: f64 = 1.0 - 1e-12;

/// Reference solution handed to a solver for gap telemetry only; the
/// iteration itself never reads it.
#[derive(Debug, Clone)]
pub struct ReferencePoint {
    pub x_ref: Vec<f64>,
    pub f_ref: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Stop when `||f'(y_k)|| <= tol_grad`.
    pub tol_grad: f64,
    /// Cap on total gradient evaluations (not iterations; the adaptive
    /// scheme can spend two per iteration).
    pub max_grad_calls: usize,
    /// Step-selection heuristic; required by the adaptive solver.
    pub heuristic: Option<Heuristic>,
    /// Restart period for the momentum scheme; `None` means never restart.
    pub restart_period: Option<usize>,
    pub track_estimate_sequence: bool,
    pub record_trajectory: bool,
    pub reference: Option<ReferencePoint>,
    /// Measure wall time around gradient evaluations and update arithmetic.
    /// Off means every elapsed_ns is zero, for byte-reproducible traces.
    pub timing: bool,
}

impl SolverConfig {
    pub fn new(tol_grad: f64, max_grad_calls: usize) -> Self {
        Self {
            tol_grad,
            max_grad_calls,
            heuristic: None,
            restart_period: None,
            track_estimate_sequence: false,
            record_trajectory: false,
            reference: None,
            timing: false,
        }
    }

    fn validate(&self, obj: &dyn Objective, x0: &[f64]) -> Result<()> {
        if !(self.tol_grad > 0.0) {
            return Err(Error::InvalidParameter("tol_grad must be > 0".into()));
        }
        if self.max_grad_calls == 0 {
            return Err(Error::InvalidParameter("max_grad_calls must be >= 1".into()));
        }
        if x0.len() != obj.dim() {
            return Err(Error::DimensionMismatch { left: x0.len(), right: obj.dim() });
        }
        if !vecops::all_finite(x0) {
            return Err(Error::InvalidParameter("x0 has non-finite entries".into()));
        }
        if !(obj.mu() > 0.0 && obj.lip() >= obj.mu() && obj.lip().is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "objective constants must satisfy 0 < mu <= L, got mu={}, L={}",
                obj.mu(),
                obj.lip()
            )));
        }
        Ok(())
    }
}

/// One solver iteration's points and the step parameter that produced them.
#[derive(Debug, Clone)]
pub struct IterState {
    /// Current iterate `x_k`.
    pub x: Vec<f64>,
    /// Estimate-sequence center `v_k`.
    pub v: Vec<f64>,
    /// Extrapolation point `y_k` whose gradient is cached below.
    pub y: Vec<f64>,
    /// `alpha_k` used in the step that produced this state.
    pub alpha: f64,
    pub grad_y: Vec<f64>,
    pub grad_y_norm: f64,
}

/// Per-iteration telemetry. `grad_calls` counts the gradient evaluations
/// consumed in producing the iterate of this row, cumulatively; it is
/// non-decreasing and grows by 1 (fixed-step schemes) or 1..=2 (adaptive)
/// per row. `elapsed_ns` is cumulative solver time, telemetry excluded.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub k: usize,
    pub grad_calls: usize,
    pub alpha: f64,
    pub fallback: bool,
    pub f_gap: Option<f64>,
    pub x_err: Option<f64>,
    pub elapsed_ns: u64,
}

/// Snapshot of the estimate-sequence invariants at iteration `k`.
#[derive(Debug, Clone)]
pub struct EstimateRecord {
    pub k: usize,
    pub f_x: f64,
    pub phi_star: f64,
    pub lambda: f64,
    /// `||v_k - x_ref||^2` when a reference is available.
    pub v_err_sq: Option<f64>,
}

#[derive(Debug)]
pub struct SolverRun {
    pub state: IterState,
    pub trace: Vec<TraceRecord>,
    pub estimates: Option<Vec<EstimateRecord>>,
    /// Every iterate including the start point, when recording was on.
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub grad_calls: usize,
    pub converged: bool,
}

impl SolverRun {
    pub fn final_f(&self, obj: &dyn Objective) -> f64 {
        obj.value(&self.state.x)
    }
}

/// Project onto the feasible ball when the objective is constrained.
fn maybe_project(obj: &dyn Objective, x: Vec<f64>) -> Vec<f64> {
    match obj.feasible_radius() {
        Some(r) => vecops::project_ball(&x, r),
        None => x,
    }
}

/// `y = (x + alpha v) / (1 + alpha)`.
fn extrapolate(x: &[f64], v: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let s = 1.0 / (1.0 + alpha);
    vecops::axpby(s, x, alpha * s, v)
}

/// Cumulative stopwatch that is a no-op when timing is off.
struct Stopwatch {
    enabled: bool,
    total_ns: u64,
    started: Option<Instant>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Self { enabled, total_ns: 0, started: None }
    }

    fn start(&mut self) {
        if self.enabled {
            self.started = Some(Instant::now());
        }
    }

    fn stop(&mut self) {
        if let Some(t) = self.started.take() {
            self.total_ns += t.elapsed().as_nanos() as u64;
        }
    }
}

/// Collects trace rows, trajectory points, and estimate records as a run
/// progresses. All of it is observation: nothing here feeds back into the
/// iteration.
struct Telemetry<'a> {
    obj: &'a dyn Objective,
    reference: Option<&'a ReferencePoint>,
    trace: Vec<TraceRecord>,
    trajectory: Option<Vec<Vec<f64>>>,
    tracker: Option<EstimateTracker>,
    estimates: Vec<EstimateRecord>,
    watch: Stopwatch,
}

impl<'a> Telemetry<'a> {
    fn new(obj: &'a dyn Objective, cfg: &'a SolverConfig) -> Self {
        Self {
            obj,
            reference: cfg.reference.as_ref(),
            trace: Vec::new(),
            trajectory: cfg.record_trajectory.then(Vec::new),
            tracker: None,
            estimates: Vec::new(),
            watch: Stopwatch::new(cfg.timing),
        }
    }

    fn init_tracking(&mut self, cfg: &SolverConfig, x0: &[f64]) {
        if cfg.track_estimate_sequence {
            let f0 = self.obj.value(x0);
            self.tracker = Some(EstimateTracker::new(f0, x0));
            self.estimates.push(EstimateRecord {
                k: 0,
                f_x: f0,
                phi_star: f0,
                lambda: 1.0,
                v_err_sq: self.v_err_sq(x0),
            });
        }
    }

    fn v_err_sq(&self, v: &[f64]) -> Option<f64> {
        self.reference
            .map(|r| vecops::norm2_sq(&vecops::sub(v, &r.x_ref).expect("dim")))
    }

    /// Advance the estimate sequence with the step that just produced
    /// `x_next` and record the invariant quantities.
    fn track_step(&mut self, k: usize, alpha: f64, y: &[f64], grad_y: &[f64], x_next: &[f64]) {
        let Some(tracker) = self.tracker.as_mut() else { return };
        let f_y = self.obj.value(y);
        tracker.advance(alpha, y, grad_y, f_y, self.obj.mu()).expect("dim");
        let v_err_sq = self
            .reference
            .map(|r| vecops::norm2_sq(&vecops::sub(tracker.v(), &r.x_ref).expect("dim")));
        self.estimates.push(EstimateRecord {
            k,
            f_x: self.obj.value(x_next),
            phi_star: tracker.phi_star(),
            lambda: tracker.lambda(),
            v_err_sq,
        });
    }

    fn record(&mut self, k: usize, grad_calls: usize, alpha: f64, fallback: bool, x: &[f64]) {
        let (f_gap, x_err) = match self.reference {
            Some(r) => (
                Some(self.obj.value(x) - r.f_ref),
                Some(vecops::norm2(&vecops::sub(x, &r.x_ref).expect("dim"))),
            ),
            None => (None, None),
        };
        self.trace.push(TraceRecord {
            k,
            grad_calls,
            alpha,
            fallback,
            f_gap,
            x_err,
            elapsed_ns: self.watch.total_ns,
        });
        if let Some(traj) = self.trajectory.as_mut() {
            traj.push(x.to_vec());
        }
    }

    fn diverged(self, quantity: &str, k: usize) -> Error {
        Error::Divergence { quantity: quantity.to_string(), k, trace: self.trace }
    }

    fn finish(self, state: IterState, grad_calls: usize, converged: bool) -> SolverRun {
        SolverRun {
            state,
            trace: self.trace,
            estimates: self.tracker.is_some().then_some(self.estimates),
            trajectory: self.trajectory,
            grad_calls,
            converged,
        }
    }
}
