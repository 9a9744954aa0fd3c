//! Momentum scheme for objectives where only `L` is trusted: the
//! `t`-sequence extrapolation (`t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`)
//! with optional periodic restart, which recovers linear convergence on
//! strongly convex problems without using `mu` in the iteration.

use crate::error::Result;
use crate::problems::Objective;
use crate::solvers::const_step::{run_momentum, Momentum};
use crate::solvers::{SolverConfig, SolverRun};

/// Runs the restarted momentum scheme. `cfg.restart_period = None` never
/// restarts; `Some(p)` resets `t` to 1 and collapses `y` onto `x` every `p`
/// iterations. One gradient evaluation per iteration.
pub fn nesterov_l_restart(obj: &dyn Objective, x0: &[f64], cfg: &SolverConfig) -> Result<SolverRun> {
    run_momentum(obj, x0, cfg, Momentum::Restarted)
}
