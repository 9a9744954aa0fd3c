//! CLI for the first-order method benchmarks.
//!
//! `run` executes one (problem, method) experiment and prints a summary
//! line; `compare` runs several methods on the same problem instance and
//! emits one row per method. Exit codes: 0 success, 2 configuration error,
//! 3 numerical divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use agm_bench::compare::{compare, comparison_csv_string, write_comparison_csv};
use agm_bench::config::{
    parse_coords, parse_methods, ConfigFile, ExperimentConfig, HarnessError, MethodKind,
    ProblemKind,
};
use agm_bench::experiment::{run_experiment, Summary};

#[derive(Parser)]
#[command(name = "agm-bench", about = "first-order solver benchmarks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its summary line.
    Run(RunArgs),
    /// Run several methods on the same problem and compare them.
    Compare(CompareArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key=value config file applied before flag overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem: ridge | bowl | bpdn | quadratic.
    #[arg(long)]
    problem: Option<String>,
    /// Generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Stop when the gradient norm falls below this.
    #[arg(long)]
    tol_grad: Option<f64>,
    /// Cap on total gradient evaluations.
    #[arg(long)]
    max_grad_calls: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Zero the time_ns column for reproducible files.
    #[arg(long)]
    no_timing: bool,
    /// Reference-solution cache directory.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Method: nl | nmul | adaptive1..4 | cgls.
    #[arg(long)]
    method: Option<String>,
    /// Restart period for nl.
    #[arg(long)]
    restart: Option<usize>,
    /// Trajectory-projection CSV path.
    #[arg(long)]
    traj: Option<PathBuf>,
    /// Trajectory coordinates as i,j (defaults to first and last).
    #[arg(long)]
    traj_coords: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated method list.
    #[arg(long)]
    methods: Option<String>,
}

fn load_config_file(path: &Option<PathBuf>) -> Result<ConfigFile, HarnessError> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn apply_common(cfg: &mut ExperimentConfig, file: &ConfigFile, args: &CommonArgs) {
    if let Some(seed) = file.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = file.tol_grad {
        cfg.tol_grad = tol;
    }
    if let Some(max) = file.max_grad_calls {
        cfg.max_grad_calls = max;
    }
    if let Some(out) = &file.out {
        cfg.out = Some(out.clone());
    }
    if let Some(no_timing) = file.no_timing {
        cfg.no_timing = no_timing;
    }
    if let Some(dir) = &file.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }

    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol_grad {
        cfg.tol_grad = tol;
    }
    if let Some(max) = args.max_grad_calls {
        cfg.max_grad_calls = max;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if args.no_timing {
        cfg.no_timing = true;
    }
    if let Some(dir) = &args.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
}

fn resolve_problem(file: &ConfigFile, flag: &Option<String>) -> Result<ProblemKind, HarnessError> {
    match flag {
        Some(s) => s.parse(),
        None => file
            .problem
            .ok_or_else(|| HarnessError::Config("no problem given (flag or config file)".into())),
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), HarnessError> {
    let file = load_config_file(&args.common.config)?;
    let problem = resolve_problem(&file, &args.common.problem)?;
    let method: MethodKind = match &args.method {
        Some(s) => s.parse()?,
        None => file
            .method
            .ok_or_else(|| HarnessError::Config("no method given (flag or config file)".into()))?,
    };

    let mut cfg = ExperimentConfig::new(problem, method);
    if let Some(r) = file.restart {
        cfg.restart_period = Some(r);
    }
    if let Some(t) = &file.traj {
        cfg.traj = Some(t.clone());
    }
    if let Some(c) = file.traj_coords {
        cfg.traj_coords = Some(c);
    }
    apply_common(&mut cfg, &file, &args.common);
    if let Some(r) = args.restart {
        cfg.restart_period = Some(r);
    }
    if let Some(t) = &args.traj {
        cfg.traj = Some(t.clone());
    }
    if let Some(c) = &args.traj_coords {
        cfg.traj_coords = Some(parse_coords(c)?);
    }

    let outcome = run_experiment(&cfg)?;
    println!("{}", Summary::header());
    println!("{}", outcome.summary.to_csv_row());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), HarnessError> {
    let file = load_config_file(&args.common.config)?;
    let problem = resolve_problem(&file, &args.common.problem)?;
    let methods = match &args.methods {
        Some(s) => parse_methods(s)?,
        None => file
            .methods
            .clone()
            .ok_or_else(|| HarnessError::Config("no methods given (flag or config file)".into()))?,
    };
    if methods.len() < 2 {
        return Err(HarnessError::Config("compare needs at least two methods".into()));
    }

    let mut cfgs = Vec::new();
    for method in methods {
        let mut cfg = ExperimentConfig::new(problem, method);
        apply_common(&mut cfg, &file, &args.common);
        cfg.out = None; // per-method traces are not written in compare mode
        cfgs.push(cfg);
    }
    let comparison = compare(&cfgs)?;

    print!("{}", comparison_csv_string(&comparison.rows));
    if let Some(out) = &args.common.out {
        write_comparison_csv(out, &comparison.rows)
            .map_err(|e| HarnessError::Io(format!("writing {}: {e}", out.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
