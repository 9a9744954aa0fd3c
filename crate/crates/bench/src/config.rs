//! Experiment configuration: which problem, which method, and the run
//! parameters, assembled from a plain `key=value` file and/or command-line
//! overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use agm_core::cubic::Heuristic;

/// Errors carry the process exit code contract: configuration problems exit
/// with 2, numerical divergence with 3.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<agm_core::Error> for HarnessError {
    fn from(e: agm_core::Error) -> Self {
        use agm_core::Error as E;
        match e {
            E::InvalidParameter(m) => HarnessError::Config(m),
            E::Io(m) => HarnessError::Io(m.to_string()),
            E::BadFormat(m) => HarnessError::Io(m),
            other => HarnessError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Ridge,
    Bowl,
    Bpdn,
    Quadratic,
}

impl FromStr for ProblemKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ridge" => Ok(ProblemKind::Ridge),
            "bowl" => Ok(ProblemKind::Bowl),
            "bpdn" => Ok(ProblemKind::Bpdn),
            "quadratic" => Ok(ProblemKind::Quadratic),
            other => Err(HarnessError::Config(format!(
                "unknown problem {other:?} (expected ridge|bowl|bpdn|quadratic)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Ridge => "ridge",
            ProblemKind::Bowl => "bowl",
            ProblemKind::Bpdn => "bpdn",
            ProblemKind::Quadratic => "quadratic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    /// Momentum scheme with optional restart.
    Nl,
    /// Constant-step scheme.
    Nmul,
    /// Adaptive-step scheme with the given selection heuristic.
    Adaptive(Heuristic),
    /// Conjugate gradients on the normal equations (least-squares problems
    /// only).
    Cgls,
}

impl FromStr for MethodKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nl" => Ok(MethodKind::Nl),
            "nmul" => Ok(MethodKind::Nmul),
            "adaptive1" => Ok(MethodKind::Adaptive(Heuristic::H1)),
            "adaptive2" => Ok(MethodKind::Adaptive(Heuristic::H2)),
            "adaptive3" => Ok(MethodKind::Adaptive(Heuristic::H3)),
            "adaptive4" => Ok(MethodKind::Adaptive(Heuristic::H4)),
            "cgls" => Ok(MethodKind::Cgls),
            other => Err(HarnessError::Config(format!(
                "unknown method {other:?} (expected nl|nmul|adaptive1..4|cgls)"
            ))),
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MethodKind::Nl => "nl",
            MethodKind::Nmul => "nmul",
            MethodKind::Adaptive(Heuristic::H1) => "adaptive1",
            MethodKind::Adaptive(Heuristic::H2) => "adaptive2",
            MethodKind::Adaptive(Heuristic::H3) => "adaptive3",
            MethodKind::Adaptive(Heuristic::H4) => "adaptive4",
            MethodKind::Cgls => "cgls",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub method: MethodKind,
    pub restart_period: Option<usize>,
    pub seed: u64,
    pub tol_grad: f64,
    pub max_grad_calls: usize,
    /// Trace CSV destination.
    pub out: Option<PathBuf>,
    /// Trajectory-projection CSV destination.
    pub traj: Option<PathBuf>,
    /// Coordinates projected into the trajectory CSV; defaults to the first
    /// and last when a trajectory is requested.
    pub traj_coords: Option<(usize, usize)>,
    /// Zero out time_ns columns for byte-reproducible outputs.
    pub no_timing: bool,
    /// Reference-solution cache directory.
    pub cache_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, method: MethodKind) -> Self {
        Self {
            problem,
            method,
            restart_period: None,
            seed: 42,
            tol_grad: 1e-10,
            max_grad_calls: 50_000,
            out: None,
            traj: None,
            traj_coords: None,
            no_timing: false,
            cache_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.method == MethodKind::Cgls
            && !matches!(self.problem, ProblemKind::Ridge | ProblemKind::Quadratic)
        {
            return Err(HarnessError::Config(format!(
                "cgls applies to least-squares problems only, not {}",
                self.problem
            )));
        }
        if self.restart_period.is_some() && self.method != MethodKind::Nl {
            return Err(HarnessError::Config("restart applies to the nl method only".into()));
        }
        if self.restart_period == Some(0) {
            return Err(HarnessError::Config("restart period must be >= 1".into()));
        }
        if !(self.tol_grad > 0.0) {
            return Err(HarnessError::Config("tol_grad must be > 0".into()));
        }
        if self.max_grad_calls == 0 {
            return Err(HarnessError::Config("max_grad_calls must be >= 1".into()));
        }
        Ok(())
    }
}

/// Key-value pairs read from a config file; the CLI applies them before its
/// own flag overrides.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    pub problem: Option<ProblemKind>,
    pub method: Option<MethodKind>,
    pub methods: Option<Vec<MethodKind>>,
    pub restart: Option<usize>,
    pub seed: Option<u64>,
    pub tol_grad: Option<f64>,
    pub max_grad_calls: Option<usize>,
    pub out: Option<PathBuf>,
    pub traj: Option<PathBuf>,
    pub traj_coords: Option<(usize, usize)>,
    pub no_timing: Option<bool>,
    pub cache_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                HarnessError::Config(format!("line {}: bad {what} value {value:?}", lineno + 1))
            };
            match key {
                "problem" => cfg.problem = Some(value.parse()?),
                "method" => cfg.method = Some(value.parse()?),
                "methods" => cfg.methods = Some(parse_methods(value)?),
                "restart" => {
                    cfg.restart = Some(value.parse().map_err(|_| bad("restart"))?);
                }
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "tol_grad" => cfg.tol_grad = Some(value.parse().map_err(|_| bad("tol_grad"))?),
                "max_grad_calls" => {
                    cfg.max_grad_calls = Some(value.parse().map_err(|_| bad("max_grad_calls"))?);
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "traj" => cfg.traj = Some(PathBuf::from(value)),
                "traj_coords" => cfg.traj_coords = Some(parse_coords(value)?),
                "no_timing" => {
                    cfg.no_timing = Some(value.parse().map_err(|_| bad("no_timing"))?);
                }
                "cache_dir" => cfg.cache_dir = Some(PathBuf::from(value)),
                other => {
                    return Err(HarnessError::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

pub fn parse_coords(s: &str) -> Result<(usize, usize)> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| HarnessError::Config(format!("traj coords must be i,j — got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| HarnessError::Config(format!("bad trajectory coordinate {t:?}")))
    };
    Ok((parse(i)?, parse(j)?))
}

pub fn parse_methods(s: &str) -> Result<Vec<MethodKind>> {
    let methods: Vec<MethodKind> = s
        .split(',')
        .map(|m| m.trim().parse())
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(HarnessError::Config("methods list is empty".into()));
    }
    Ok(methods)
}
