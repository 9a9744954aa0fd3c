//! Building a problem, obtaining its reference solution, running one
//! method, and emitting the convergence trace.

use std::path::Path;
use std::time::Instant;

use agm_core::problems::{
    bpdn_build, quad_build, ridge_build, BowlSpec, BpdnSpec, BuiltProblem, QuadSpec, RidgeSpec,
};
use agm_core::reference::{cgls_observed, reference_solution, ReferenceCache, ReferenceSolution};
use agm_core::solvers::{
    nesterov_adaptive, nesterov_const_step, nesterov_l_restart, ReferencePoint, SolverConfig,
    TraceRecord,
};
use agm_core::vecops;

use crate::config::{ExperimentConfig, HarnessError, MethodKind, ProblemKind, Result};

/// The f-gap levels every summary reports.
pub const GAP_THRESHOLDS: [f64; 3] = [1e-6, 1e-9, 1e-12];

#[derive(Debug, Clone, Copy, Default)]
pub struct ThresholdHit {
    pub grad_calls: Option<usize>,
    pub time_ns: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub problem: ProblemKind,
    pub method: MethodKind,
    pub restart: Option<usize>,
    pub hits: [ThresholdHit; 3],
    pub converged: bool,
    pub grad_calls: usize,
}

impl Summary {
    pub fn header() -> String {
        let mut cols = vec!["problem".to_string(), "method".into(), "restart".into()];
        for t in GAP_THRESHOLDS {
            cols.push(format!("calls_to_{t:e}"));
            cols.push(format!("time_ns_to_{t:e}"));
        }
        cols.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let mut cols = vec![
            self.problem.to_string(),
            self.method.to_string(),
            self.restart.map(|p| p.to_string()).unwrap_or_default(),
        ];
        for hit in self.hits {
            cols.push(hit.grad_calls.map(|c| c.to_string()).unwrap_or_default());
            cols.push(hit.time_ns.map(|t| t.to_string()).unwrap_or_default());
        }
        cols.join(",")
    }
}

pub struct ExperimentOutcome {
    pub trace: Vec<TraceRecord>,
    pub trajectory: Option<Vec<Vec<f64>>>,
    pub summary: Summary,
    pub final_x: Vec<f64>,
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<BuiltProblem> {
    Ok(match cfg.problem {
        ProblemKind::Ridge => BuiltProblem::Ridge(ridge_build(&RidgeSpec::paper(cfg.seed))?),
        ProblemKind::Bowl => BuiltProblem::Bowl(BowlSpec::paper().build()?),
        ProblemKind::Bpdn => BuiltProblem::Bpdn(bpdn_build(&BpdnSpec::paper(cfg.seed))?),
        ProblemKind::Quadratic => {
            BuiltProblem::Quad(quad_build(&QuadSpec::new(50, 1e4, cfg.seed))?)
        }
    })
}

pub fn obtain_reference(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
) -> Result<ReferenceSolution> {
    match &cfg.cache_dir {
        Some(dir) => Ok(ReferenceCache::new(dir).get_or_compute(problem)?),
        None => Ok(reference_solution(problem)?),
    }
}

/// Runs one experiment end to end and writes any requested CSV outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let problem = build_problem(cfg)?;
    let reference = obtain_reference(cfg, &problem)?;
    let outcome = run_on(cfg, &problem, &reference)?;

    if let Some(path) = &cfg.out {
        write_trace_csv(path, &outcome.trace)
            .map_err(|e| HarnessError::Io(format!("writing {}: {e}", path.display())))?;
    }
    if let Some(path) = &cfg.traj {
        let traj = outcome
            .trajectory
            .as_ref()
            .expect("trajectory recording was enabled by cfg.traj");
        let dim = problem.objective().dim();
        let (i, j) = cfg.traj_coords.unwrap_or((0, dim - 1));
        let projected = trajectory_projection(traj, i, j, dim)?;
        write_trajectory_csv(path, &projected)
            .map_err(|e| HarnessError::Io(format!("writing {}: {e}", path.display())))?;
    }
    Ok(outcome)
}

/// Runs the configured method against an already-built problem. Split from
/// `run_experiment` so comparisons can share one problem and reference.
pub fn run_on(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    reference: &ReferenceSolution,
) -> Result<ExperimentOutcome> {
    let obj = problem.objective();
    let x0 = problem.start_point();

    let mut solver_cfg = SolverConfig::new(cfg.tol_grad, cfg.max_grad_calls);
    solver_cfg.reference =
        Some(ReferencePoint { x_ref: reference.x_ref.clone(), f_ref: reference.f_ref });
    solver_cfg.record_trajectory = cfg.traj.is_some();
    solver_cfg.timing = !cfg.no_timing;

    let (trace, trajectory, final_x, converged, grad_calls) = match cfg.method {
        MethodKind::Nmul => {
            let run = nesterov_const_step(obj, &x0, &solver_cfg)?;
            (run.trace, run.trajectory, run.state.x, run.converged, run.grad_calls)
        }
        MethodKind::Nl => {
            solver_cfg.restart_period = cfg.restart_period;
            let run = nesterov_l_restart(obj, &x0, &solver_cfg)?;
            (run.trace, run.trajectory, run.state.x, run.converged, run.grad_calls)
        }
        MethodKind::Adaptive(h) => {
            solver_cfg.heuristic = Some(h);
            let run = nesterov_adaptive(obj, &x0, &solver_cfg)?;
            (run.trace, run.trajectory, run.state.x, run.converged, run.grad_calls)
        }
        MethodKind::Cgls => run_cgls(cfg, problem, reference)?,
    };

    let summary = Summary {
        problem: cfg.problem,
        method: cfg.method,
        restart: cfg.restart_period,
        hits: summarize(&trace),
        converged,
        grad_calls,
    };
    Ok(ExperimentOutcome { trace, trajectory, summary, final_x })
}

/// CGLS run shaped like a solver trace. One CGLS iteration costs one product
/// with `A` and one with `A^T`, the price of one gradient evaluation, so
/// `grad_calls` advances by 1 per iteration; the alpha column carries the CG
/// step length.
fn run_cgls(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    reference: &ReferenceSolution,
) -> Result<(Vec<TraceRecord>, Option<Vec<Vec<f64>>>, Vec<f64>, bool, usize)> {
    let (a, b, lambda, value): (_, _, _, Box<dyn Fn(&[f64]) -> f64>) = match problem {
        BuiltProblem::Ridge(p) => (
            p.objective.a(),
            p.objective.b(),
            p.objective.lambda(),
            Box::new(|x: &[f64]| agm_core::problems::Objective::value(&p.objective, x)),
        ),
        BuiltProblem::Quad(p) => (
            p.objective.a(),
            p.objective.b(),
            0.0,
            Box::new(|x: &[f64]| agm_core::problems::Objective::value(&p.objective, x)),
        ),
        _ => {
            return Err(HarnessError::Config(
                "cgls applies to least-squares problems only".into(),
            ))
        }
    };

    // stop on the same absolute gradient tolerance the other methods use
    let atb_norm = vecops::norm2(&a.matvec_t(b).map_err(agm_core::Error::from)?);
    let rel_tol = if atb_norm > 0.0 { cfg.tol_grad / atb_norm } else { 1.0 };

    let mut trace = Vec::new();
    let mut trajectory = cfg.traj.is_some().then(Vec::new);
    let timing = !cfg.no_timing;
    let mut elapsed_ns = 0u64;
    let mut segment_start = timing.then(Instant::now);

    let x0 = vec![0.0; a.cols()];
    let mut record = |k: usize, x: &[f64], step: f64, elapsed_ns: u64| {
        trace.push(TraceRecord {
            k,
            grad_calls: k,
            alpha: step,
            fallback: false,
            f_gap: Some(value(x) - reference.f_ref),
            x_err: Some(vecops::norm2(&vecops::sub(x, &reference.x_ref).expect("dim"))),
            elapsed_ns,
        });
        if let Some(t) = trajectory.as_mut() {
            t.push(x.to_vec());
        }
    };
    record(0, &x0, 0.0, 0);

    let out = cgls_observed(a, b, lambda, rel_tol, cfg.max_grad_calls, |k, x, step| {
        if let Some(start) = segment_start.take() {
            elapsed_ns += start.elapsed().as_nanos() as u64;
        }
        record(k, x, step, elapsed_ns);
        segment_start = timing.then(Instant::now);
    })
    .map_err(HarnessError::from)?;

    let iterations = out.iterations;
    Ok((trace, trajectory, out.x, out.converged, iterations))
}

fn summarize(trace: &[TraceRecord]) -> [ThresholdHit; 3] {
    let mut hits = [ThresholdHit::default(); 3];
    for (slot, threshold) in hits.iter_mut().zip(GAP_THRESHOLDS) {
        for r in trace {
            if let Some(gap) = r.f_gap {
                if gap < threshold {
                    *slot = ThresholdHit { grad_calls: Some(r.grad_calls), time_ns: Some(r.elapsed_ns) };
                    break;
                }
            }
        }
    }
    hits
}

/// Pairs of the two selected coordinates, one row per recorded iterate.
pub fn trajectory_projection(
    trajectory: &[Vec<f64>],
    i: usize,
    j: usize,
    dim: usize,
) -> Result<Vec<(f64, f64)>> {
    if i >= dim || j >= dim {
        return Err(HarnessError::Config(format!(
            "trajectory coordinates ({i},{j}) out of range for dimension {dim}"
        )));
    }
    Ok(trajectory.iter().map(|x| (x[i], x[j])).collect())
}

/// Exact fixed schema: `k,grad_calls,alpha,fallback,f_gap,x_err,time_ns`.
pub fn trace_csv_string(trace: &[TraceRecord]) -> String {
    let mut out = String::from("k,grad_calls,alpha,fallback,f_gap,x_err,time_ns\n");
    for r in trace {
        let f_gap = r.f_gap.map(|v| format!("{v:e}")).unwrap_or_default();
        let x_err = r.x_err.map(|v| format!("{v:e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{:e},{},{},{},{}\n",
            r.k,
            r.grad_calls,
            r.alpha,
            u8::from(r.fallback),
            f_gap,
            x_err,
            r.elapsed_ns
        ));
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &[TraceRecord]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, trace_csv_string(trace))
}

pub fn write_trajectory_csv(path: &Path, rows: &[(f64, f64)]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::from("k,xi,xj\n");
    for (k, (xi, xj)) in rows.iter().enumerate() {
        out.push_str(&format!("{k},{xi:e},{xj:e}\n"));
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_finds_first_crossing() {
        let mk = |k: usize, gap: f64| TraceRecord {
            k,
            grad_calls: k,
            alpha: 0.5,
            fallback: false,
            f_gap: Some(gap),
            x_err: None,
            elapsed_ns: (k * 10) as u64,
        };
        let trace = vec![mk(0, 1.0), mk(1, 1e-7), mk(2, 1e-8), mk(3, 1e-13)];
        let hits = summarize(&trace);
        assert_eq!(hits[0].grad_calls, Some(1)); // < 1e-6
        assert_eq!(hits[1].grad_calls, Some(3)); // < 1e-9
        assert_eq!(hits[2].grad_calls, Some(3)); // < 1e-12
    }

    #[test]
    fn summary_leaves_unreached_thresholds_empty() {
        let trace = vec![TraceRecord {
            k: 0,
            grad_calls: 0,
            alpha: 0.5,
            fallback: false,
            f_gap: Some(1e-3),
            x_err: None,
            elapsed_ns: 0,
        }];
        let hits = summarize(&trace);
        assert!(hits.iter().all(|h| h.grad_calls.is_none() && h.time_ns.is_none()));
    }

    #[test]
    fn trajectory_projection_checks_range() {
        let traj = vec![vec![1.0, 2.0, 3.0]];
        assert!(trajectory_projection(&traj, 0, 2, 3).is_ok());
        assert!(matches!(
            trajectory_projection(&traj, 0, 3, 3),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn trace_csv_schema_is_exact() {
        let trace = vec![TraceRecord {
            k: 0,
            grad_calls: 0,
            alpha: 0.1,
            fallback: true,
            f_gap: None,
            x_err: Some(2.0),
            elapsed_ns: 5,
        }];
        let csv = trace_csv_string(&trace);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "k,grad_calls,alpha,fallback,f_gap,x_err,time_ns");
        assert_eq!(lines.next().unwrap(), "0,0,1e-1,1,,2e0,5");
    }
}
