//! Side-by-side comparison of methods on one problem instance: every
//! config shares the problem and reference, the `nl` entry sweeps its
//! restart schedules and reports the best, and the output is one summary
//! row per method.

use std::path::Path;

use crate::config::{ExperimentConfig, HarnessError, MethodKind, Result};
use crate::experiment::{build_problem, obtain_reference, run_on, ExperimentOutcome, Summary};

/// Restart schedules swept for the `nl` method; `None` is "never restart".
pub const NL_RESTARTS: [Option<usize>; 4] = [Some(10), Some(100), Some(1000), None];

pub struct Comparison {
    pub rows: Vec<Summary>,
    pub outcomes: Vec<ExperimentOutcome>,
}

/// Runs every config against the shared problem instance. Configs must
/// agree on problem and seed — the comparison is meaningless otherwise.
pub fn compare(cfgs: &[ExperimentConfig]) -> Result<Comparison> {
    if cfgs.len() < 2 {
        return Err(HarnessError::Config("compare needs at least two configs".into()));
    }
    let first = &cfgs[0];
    for c in cfgs {
        c.validate()?;
        if c.problem != first.problem || c.seed != first.seed {
            return Err(HarnessError::Config(format!(
                "compare configs disagree: {}/seed {} vs {}/seed {}",
                c.problem, c.seed, first.problem, first.seed
            )));
        }
    }

    let problem = build_problem(first)?;
    let reference = obtain_reference(first, &problem)?;

    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for cfg in cfgs {
        if cfg.method == MethodKind::Nl && cfg.restart_period.is_none() {
            let (best, outcome) = best_nl(cfg, &problem, &reference)?;
            rows.push(best);
            outcomes.push(outcome);
        } else {
            let outcome = run_on(cfg, &problem, &reference)?;
            rows.push(outcome.summary.clone());
            outcomes.push(outcome);
        }
    }
    Ok(Comparison { rows, outcomes })
}

/// Sweeps the nl restart schedules and keeps the best: most thresholds
/// reached, ties broken by gradient calls at the tightest one reached.
fn best_nl(
    cfg: &ExperimentConfig,
    problem: &agm_core::problems::BuiltProblem,
    reference: &agm_core::reference::ReferenceSolution,
) -> Result<(Summary, ExperimentOutcome)> {
    let mut best: Option<(Summary, ExperimentOutcome)> = None;
    for restart in NL_RESTARTS {
        let mut sweep_cfg = cfg.clone();
        sweep_cfg.restart_period = restart;
        let outcome = run_on(&sweep_cfg, problem, reference)?;
        let summary = outcome.summary.clone();
        let better = match &best {
            None => true,
            Some((incumbent, _)) => rank(&summary) < rank(incumbent),
        };
        if better {
            best = Some((summary, outcome));
        }
    }
    Ok(best.expect("sweep is non-empty"))
}

/// Sort key: fewer unreached thresholds first, then calls at the tightest
/// reached threshold.
fn rank(s: &Summary) -> (usize, usize) {
    let reached = s.hits.iter().filter(|h| h.grad_calls.is_some()).count();
    let tightest_calls = s
        .hits
        .iter()
        .rev()
        .find_map(|h| h.grad_calls)
        .unwrap_or(usize::MAX);
    (s.hits.len() - reached, tightest_calls)
}

pub fn comparison_csv_string(rows: &[Summary]) -> String {
    let mut out = Summary::header();
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn write_comparison_csv(path: &Path, rows: &[Summary]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, comparison_csv_string(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemKind;
    use crate::experiment::ThresholdHit;

    fn summary_with(calls: [Option<usize>; 3]) -> Summary {
        Summary {
            problem: ProblemKind::Quadratic,
            method: MethodKind::Nl,
            restart: Some(10),
            hits: calls.map(|c| ThresholdHit { grad_calls: c, time_ns: c.map(|v| v as u64) }),
            converged: true,
            grad_calls: 100,
        }
    }

    #[test]
    fn rank_prefers_more_thresholds_then_fewer_calls() {
        let all = summary_with([Some(10), Some(20), Some(30)]);
        let partial = summary_with([Some(5), Some(6), None]);
        assert!(rank(&all) < rank(&partial));
        let slower = summary_with([Some(10), Some(20), Some(40)]);
        assert!(rank(&all) < rank(&slower));
    }

    #[test]
    fn compare_rejects_mixed_problems_and_too_few_configs() {
        let a = ExperimentConfig::new(ProblemKind::Quadratic, MethodKind::Nmul);
        assert!(matches!(compare(&[a.clone()]), Err(HarnessError::Config(_))));
        let mut b = ExperimentConfig::new(ProblemKind::Bowl, MethodKind::Nmul);
        b.seed = a.seed;
        assert!(matches!(compare(&[a, b]), Err(HarnessError::Config(_))));
    }

    #[test]
    fn single_method_restart_sweep_returns_min() {
        // quadratic is the cheapest problem; sweep nl and check the chosen
        // row is at least as good as a fixed schedule
        let mut nl = ExperimentConfig::new(ProblemKind::Quadratic, MethodKind::Nl);
        nl.max_grad_calls = 3000;
        nl.tol_grad = 1e-11;
        let mut nmul = ExperimentConfig::new(ProblemKind::Quadratic, MethodKind::Nmul);
        nmul.max_grad_calls = 3000;
        nmul.tol_grad = 1e-11;
        let cmp = compare(&[nl.clone(), nmul]).unwrap();
        let best = &cmp.rows[0];

        let mut fixed = nl;
        fixed.restart_period = Some(1000);
        let problem = build_problem(&fixed).unwrap();
        let reference = obtain_reference(&fixed, &problem).unwrap();
        let fixed_run = run_on(&fixed, &problem, &reference).unwrap();
        assert!(rank(best) <= rank(&fixed_run.summary));
    }
}
