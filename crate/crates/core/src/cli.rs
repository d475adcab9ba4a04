//! Batch front-end behind the `isogeom` binary.
//!
//! Every numeric flag can also come from a TOML file passed with
//! `--config`. Keys are the flag names in snake_case, either at the top
//! level or under a table named after the subcommand; an explicit flag
//! always wins. A `[tolerances]` table overrides the numerical tolerances.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 undefined
//! phase, 4 optimizer stalled, 5 grid too coarse.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::distance::{bures_distance, dynamic_distance, DistanceConfig};
use crate::dynamics::{self, RESIDUAL_FLOOR};
use crate::error::{Error, Result};
use crate::geometry::{GeometryContext, DEFAULT_HBAR, DEFAULT_MIN_EIGENVALUE};
use crate::io::{self, HamiltonianFile};
use crate::operator::{spectrum_of, BundlePoint, DensityOperator, Tolerances};
use crate::{random, scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PHASE_UNDEFINED: i32 = 3;
pub const EXIT_STALLED: i32 = 4;
pub const EXIT_GRID_TOO_COARSE: i32 = 5;

/// Slack allowed in the `dynamic ≥ bures` verdict.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "isogeom", version, about = "Bundle geometry of isospectral density operators")]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Operational geometric phase of a lifted curve.
    Phase(PhaseArgs),
    /// Upper bound on the dynamic distance between two isospectral states.
    Distance(DistanceArgs),
    /// Dynamic distance and Bures distance over seeded random pairs.
    Ensemble(EnsembleArgs),
    /// Dump a horizontal lift as CSV.
    Lift(LiftArgs),
    /// Write the input files of a canonical scenario.
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CurveArgs {
    /// Hamiltonian: a matrix file or a piecewise path document.
    #[arg(long = "H")]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// Starting bundle point; defaults to the standard purification.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Smallest eigenvalue accepted by the connection.
    #[arg(long)]
    pub min_eigenvalue: Option<f64>,
    /// Accepted for uniformity; the curve commands draw no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LiftArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Leave the gauge factor `V(t)` out of the CSV.
    #[arg(long)]
    pub no_gauge: bool,
    /// Write the refinement-probe summary as JSON here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OptimizerArgs {
    #[arg(long)]
    pub segments: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub endpoint_tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Nelder–Mead evaluations per restart and penalty round.
    #[arg(long)]
    pub evaluations: Option<usize>,
    #[arg(long)]
    pub hamiltonian_bound: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DistanceArgs {
    #[arg(long)]
    pub rho0: Option<PathBuf>,
    #[arg(long)]
    pub rho1: Option<PathBuf>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EnsembleArgs {
    /// Hilbert-space dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Rank of the sampled states; defaults to `n`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of pairs.
    #[arg(long)]
    pub count: Option<usize>,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Directory receiving the scenario files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub family: ScenarioFamily,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ScenarioFamily {
    /// Pure qubit on a cone of polar angle θ, one period about z.
    Precession {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long, default_value_t = DEFAULT_HBAR)]
        hbar: f64,
    },
    /// diag(p, 1 − p) precessing about an axis tilted by θ from z.
    MixedPrecession {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long, default_value_t = DEFAULT_HBAR)]
        hbar: f64,
    },
    /// π pulse from |0⟩ under (ħΩ/2)σ_x.
    Rabi {
        #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
        omega: f64,
        #[arg(long, default_value_t = DEFAULT_HBAR)]
        hbar: f64,
    },
    /// Random isospectral pair.
    Pair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Values from the optional config file.
#[derive(Debug, Default)]
struct Settings {
    table: toml::Table,
    section: &'static str,
}

impl Settings {
    fn load(path: Option<&Path>, section: &'static str) -> Result<Self> {
        let table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        Ok(Settings { table, section })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        self.table
            .get(self.section)
            .and_then(|s| s.as_table())
            .and_then(|s| s.get(key))
            .or_else(|| self.table.get(key))
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e| Error::InvalidConfig(format!("key `{key}`: {e}"))),
        }
    }

    fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Result<Option<PathBuf>> {
        match flag {
            Some(p) => Ok(Some(p.clone())),
            None => Ok(self.get::<String>(key)?.map(PathBuf::from)),
        }
    }

    fn required_path(&self, flag: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
        self.path(flag, key)?
            .ok_or_else(|| Error::InvalidConfig(format!("missing required input `--{key}`")))
    }

    fn tolerances(&self) -> Result<Tolerances> {
        let tol: Tolerances = match self.table.get("tolerances") {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e| Error::InvalidConfig(format!("[tolerances]: {e}")))?,
            None => Tolerances::default(),
        };
        tol.validate()?;
        Ok(tol)
    }
}

/// Resolved parameters shared by `phase` and `lift`.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub hamiltonian: PathBuf,
    pub rho: PathBuf,
    pub psi: Option<PathBuf>,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub hbar: f64,
    pub min_eigenvalue: f64,
    pub tol: Tolerances,
    pub out: Option<PathBuf>,
}

impl CurveConfig {
    fn resolve(args: &CurveArgs, s: &Settings, default_steps: usize) -> Result<Self> {
        let cfg = CurveConfig {
            hamiltonian: s.required_path(&args.hamiltonian, "H")?,
            rho: s.required_path(&args.rho, "rho")?,
            psi: s.path(&args.psi, "psi")?,
            t0: s.pick(args.t0, "t0", 0.0)?,
            t1: s.pick(args.t1, "t1", 1.0)?,
            steps: s.pick(args.steps, "steps", default_steps)?,
            hbar: s.pick(args.hbar, "hbar", DEFAULT_HBAR)?,
            min_eigenvalue: s.pick(args.min_eigenvalue, "min_eigenvalue", DEFAULT_MIN_EIGENVALUE)?,
            tol: s.tolerances()?,
            out: s.path(&args.out, "out")?,
        };
        // Checked for type only.
        let _: u64 = s.pick(args.seed, "seed", 0)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::InvalidConfig(format!(
                "t1 must exceed t0, got t0 = {} and t1 = {}",
                self.t0, self.t1
            )));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidConfig(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(())
    }

    fn load(&self) -> Result<(dynamics::HamiltonianPath, DensityOperator, Option<BundlePoint>, GeometryContext)> {
        let h = io::read_hamiltonian(&self.hamiltonian, &self.tol)?;
        let rho = io::read_density(&self.rho, &self.tol)?;
        if h.dim() != rho.dim() {
            return Err(Error::ShapeMismatch {
                expected: (rho.dim(), rho.dim()),
                found: (h.dim(), h.dim()),
            });
        }
        let spectrum = spectrum_of(&rho, &self.tol);
        let ctx = GeometryContext::with_options(spectrum.clone(), self.hbar, self.min_eigenvalue, self.tol)?;
        let psi = match &self.psi {
            Some(p) => Some(BundlePoint::new(io::read_matrix(p)?, spectrum, &self.tol)?),
            None => None,
        };
        Ok((h, rho, psi, ctx))
    }
}

fn optimizer_config(args: &OptimizerArgs, s: &Settings) -> Result<(DistanceConfig, f64, Tolerances)> {
    let d = DistanceConfig::default();
    let config = DistanceConfig {
        segments: s.pick(args.segments, "segments", d.segments)?,
        t0: s.pick(args.t0, "t0", d.t0)?,
        t1: s.pick(args.t1, "t1", d.t1)?,
        endpoint_tol: s.pick(args.endpoint_tol, "endpoint_tol", d.endpoint_tol)?,
        restarts: s.pick(args.restarts, "restarts", d.restarts)?,
        max_rounds: s.pick(args.max_rounds, "max_rounds", d.max_rounds)?,
        evaluations_per_round: s.pick(args.evaluations, "evaluations", d.evaluations_per_round)?,
        hamiltonian_bound: s.pick(args.hamiltonian_bound, "hamiltonian_bound", d.hamiltonian_bound)?,
        seed: s.pick(args.seed, "seed", d.seed)?,
        penalty_start: s.pick(None, "penalty_start", d.penalty_start)?,
        penalty_growth: s.pick(None, "penalty_growth", d.penalty_growth)?,
    };
    config.validate()?;
    let hbar = s.pick(args.hbar, "hbar", DEFAULT_HBAR)?;
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidConfig(format!("hbar must be positive, got {hbar}")));
    }
    Ok((config, hbar, s.tolerances()?))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PhaseUndefined { .. } => EXIT_PHASE_UNDEFINED,
        Error::GridTooCoarse { .. } => EXIT_GRID_TOO_COARSE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Serialize)]
pub struct PhaseResiduals {
    pub max_horizontality: f64,
    pub max_fiber: f64,
    pub max_gauge_unitarity: f64,
}

#[derive(Debug, Serialize)]
pub struct PhaseReport {
    pub gamma_radians: f64,
    pub holonomy_trace_abs: f64,
    pub steps: usize,
    pub t0: f64,
    pub t1: f64,
    pub hbar: f64,
    pub residuals: PhaseResiduals,
}

pub fn cmd_phase(config: &CurveConfig) -> Result<PhaseReport> {
    let (h, rho, psi, ctx) = config.load()?;
    let traj = dynamics::horizontal_lift(&h, &rho, psi.as_ref(), config.t0, config.t1, config.steps, &ctx)?;
    let hol = dynamics::holonomy_of(&traj);
    let gamma = dynamics::phase_of_holonomy(&hol)?;
    let residuals = traj.horizontality_residuals(&ctx);
    let (raw, horizontal) = traj.max_fiber_residuals();
    Ok(PhaseReport {
        gamma_radians: gamma,
        holonomy_trace_abs: crate::linalg::trace(&hol).norm(),
        steps: config.steps,
        t0: config.t0,
        t1: config.t1,
        hbar: config.hbar,
        residuals: PhaseResiduals {
            max_horizontality: residuals.iter().copied().fold(0.0, f64::max),
            max_fiber: raw.max(horizontal),
            max_gauge_unitarity: traj.max_gauge_unitarity_residual(),
        },
    })
}

#[derive(Debug, Serialize)]
pub struct LiftSummary {
    pub steps: usize,
    pub max_residual: f64,
    pub refined_steps: usize,
    pub refined_max_residual: f64,
    /// Refined over original maximum residual; about 0.5 when the lift
    /// converges at first order.
    pub ratio: f64,
}

/// Lifts the curve on `steps` and on `2·steps` intervals. Returns the CSV
/// of the coarser run and the refinement summary.
pub fn cmd_lift(config: &CurveConfig, include_gauge: bool) -> Result<(String, LiftSummary)> {
    let (h, rho, psi, ctx) = config.load()?;
    let run = |steps: usize| {
        dynamics::horizontal_lift(&h, &rho, psi.as_ref(), config.t0, config.t1, steps, &ctx)
    };
    let traj = run(config.steps)?;
    let residuals = traj.horizontality_residuals(&ctx);
    let refined = run(2 * config.steps)?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let fine = max(&refined.horizontality_residuals(&ctx));
    let coarse = max(&residuals);
    if fine > RESIDUAL_FLOOR && fine >= coarse {
        return Err(Error::GridTooCoarse { fine, coarse });
    }
    let summary = LiftSummary {
        steps: config.steps,
        max_residual: coarse,
        refined_steps: 2 * config.steps,
        refined_max_residual: fine,
        ratio: if coarse > 0.0 { fine / coarse } else { 0.0 },
    };
    Ok((io::trajectory_csv(&traj, include_gauge, Some(&residuals)), summary))
}

#[derive(Debug, Serialize)]
pub struct DistanceInputs {
    pub rho0: String,
    pub rho1: String,
}

#[derive(Debug, Serialize)]
pub struct DistanceReport {
    pub inputs: DistanceInputs,
    pub seed: u64,
    pub hbar: f64,
    pub config: DistanceConfig,
    pub distance: f64,
    pub bures: f64,
    /// `distance ≥ bures − 1e-6`.
    pub bound_ok: bool,
    pub endpoint_residual: f64,
    pub stalled: bool,
    pub bound_active: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub winning_restart: usize,
    /// The only field that differs between identical runs.
    pub wall_time_seconds: f64,
    pub hamiltonian: HamiltonianFile,
}

pub fn cmd_distance(
    rho0_path: &Path,
    rho1_path: &Path,
    config: &DistanceConfig,
    hbar: f64,
    tol: &Tolerances,
) -> Result<DistanceReport> {
    let started = std::time::Instant::now();
    let rho0 = io::read_density(rho0_path, tol)?;
    let rho1 = io::read_density(rho1_path, tol)?;
    let result = dynamic_distance(&rho0, &rho1, config, hbar, tol)?;
    let bures = bures_distance(&rho0, &rho1)?;
    Ok(DistanceReport {
        inputs: DistanceInputs {
            rho0: rho0_path.display().to_string(),
            rho1: rho1_path.display().to_string(),
        },
        seed: config.seed,
        hbar,
        config: config.clone(),
        distance: result.distance,
        bures,
        bound_ok: result.distance >= bures - BOUND_SLACK,
        endpoint_residual: result.endpoint_residual,
        stalled: result.stalled,
        bound_active: result.bound_active,
        iterations: result.trace.iterations,
        evaluations: result.trace.evaluations,
        winning_restart: result.trace.winning_restart,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        hamiltonian: HamiltonianFile::from_path(&result.hamiltonian),
    })
}

pub const ENSEMBLE_HEADER: &str =
    "index,seed,n,k,dynamic,bures,gap,endpoint_residual,bound_ok,stalled,error";

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub n: usize,
    pub k: usize,
    pub count: usize,
    pub seed: u64,
    pub hbar: f64,
    pub workers: usize,
    pub distance: DistanceConfig,
    pub tol: Tolerances,
}

fn ensemble_row(index: usize, seed: u64, cfg: &EnsembleConfig) -> String {
    let (rho0, rho1) = scenario::isospectral_pair(cfg.n, cfg.k, seed);
    let distance = DistanceConfig {
        seed,
        ..cfg.distance.clone()
    };
    let prefix = format!("{index},{seed},{},{}", cfg.n, cfg.k);
    let outcome = dynamic_distance(&rho0, &rho1, &distance, cfg.hbar, &cfg.tol)
        .and_then(|r| Ok((r, bures_distance(&rho0, &rho1)?)));
    match outcome {
        Ok((r, bures)) => format!(
            "{prefix},{},{},{},{},{},{},",
            io::fmt_f64(r.distance),
            io::fmt_f64(bures),
            io::fmt_f64(r.distance - bures),
            io::fmt_f64(r.endpoint_residual),
            r.distance >= bures - BOUND_SLACK,
            r.stalled
        ),
        Err(e) => {
            let msg = e.to_string().replace([',', '\n', '"'], " ");
            format!("{prefix},,,,,,,{msg}")
        }
    }
}

/// One CSV row per pair, in index order. Pair `i` is built from the `i`-th
/// seed drawn from the master seed, so the output does not depend on the
/// number of workers.
pub fn cmd_ensemble(cfg: &EnsembleConfig) -> Result<String> {
    if cfg.n == 0 || cfg.k == 0 || cfg.k > cfg.n {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= k <= n, got n = {} and k = {}",
            cfg.n, cfg.k
        )));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidConfig("workers must be positive".into()));
    }
    cfg.distance.validate()?;
    let mut master = random::rng_from_seed(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.count).map(|_| master.random()).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let rows: Vec<String> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &seed)| ensemble_row(i, seed, cfg))
            .collect()
    });
    let mut out = String::from(ENSEMBLE_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_gamma: Option<f64>,
}

pub fn cmd_scenario(args: &ScenarioArgs) -> Result<ScenarioReport> {
    std::fs::create_dir_all(&args.out_dir)?;
    let file = |name: &str| args.out_dir.join(name);
    let curve = match &args.family {
        ScenarioFamily::Precession { theta, period, hbar } => scenario::precession(*theta, *period, *hbar),
        ScenarioFamily::MixedPrecession { p, theta, period, hbar } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidConfig(format!("p must lie in [0, 1], got {p}")));
            }
            scenario::mixed_precession(*p, *theta, *period, *hbar)
        }
        ScenarioFamily::Rabi { omega, hbar } => scenario::rabi(*omega, *hbar),
        ScenarioFamily::Pair { n, k, seed } => {
            let k = k.unwrap_or(*n);
            if *n == 0 || k == 0 || k > *n {
                return Err(Error::InvalidConfig(format!("need 1 <= k <= n, got n = {n} and k = {k}")));
            }
            let (rho0, rho1) = scenario::isospectral_pair(*n, k, *seed);
            io::write_matrix(file("rho0.json"), rho0.matrix())?;
            io::write_matrix(file("rho1.json"), rho1.matrix())?;
            return Ok(ScenarioReport {
                name: "pair".into(),
                files: vec!["rho0.json".into(), "rho1.json".into()],
                t0: None,
                t1: None,
                hbar: None,
                expected_gamma: None,
            });
        }
    };
    io::write_hamiltonian(file("H.json"), &curve.hamiltonian)?;
    io::write_matrix(file("rho.json"), curve.rho0.matrix())?;
    Ok(ScenarioReport {
        name: curve.name.into(),
        files: vec!["H.json".into(), "rho.json".into()],
        t0: Some(curve.t0),
        t1: Some(curve.t1),
        hbar: Some(curve.hbar),
        expected_gamma: curve.expected_phase,
    })
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg_path = cli.config.as_deref();
    match &cli.command {
        Command::Phase(args) => {
            let s = Settings::load(cfg_path, "phase")?;
            let config = CurveConfig::resolve(&args.curve, &s, 10_000)?;
            let report = cmd_phase(&config)?;
            write_output(config.out.as_deref(), &to_json(&report))?;
        }
        Command::Lift(args) => {
            let s = Settings::load(cfg_path, "lift")?;
            let config = CurveConfig::resolve(&args.curve, &s, 1_000)?;
            let no_gauge = args.no_gauge || s.get::<bool>("no_gauge")?.unwrap_or(false);
            let (csv, summary) = cmd_lift(&config, !no_gauge)?;
            write_output(config.out.as_deref(), &csv)?;
            if let Some(p) = s.path(&args.summary, "summary")? {
                std::fs::write(p, to_json(&summary))?;
            }
        }
        Command::Distance(args) => {
            let s = Settings::load(cfg_path, "distance")?;
            let rho0 = s.required_path(&args.rho0, "rho0")?;
            let rho1 = s.required_path(&args.rho1, "rho1")?;
            let (config, hbar, tol) = optimizer_config(&args.optimizer, &s)?;
            let report = cmd_distance(&rho0, &rho1, &config, hbar, &tol)?;
            write_output(s.path(&args.optimizer.out, "out")?.as_deref(), &to_json(&report))?;
            if report.stalled {
                eprintln!(
                    "optimizer stalled: endpoint residual {:.3e} exceeds {:.1e}",
                    report.endpoint_residual, config.endpoint_tol
                );
                return Ok(EXIT_STALLED);
            }
        }
        Command::Ensemble(args) => {
            let s = Settings::load(cfg_path, "ensemble")?;
            let (distance, hbar, tol) = optimizer_config(&args.optimizer, &s)?;
            let n = s.pick(args.n, "n", 2)?;
            let default_workers = std::thread::available_parallelism().map_or(1, |p| p.get());
            let cfg = EnsembleConfig {
                n,
                k: s.pick(args.k, "k", n)?,
                count: s.pick(args.count, "count", 100)?,
                seed: distance.seed,
                hbar,
                workers: s.pick(args.workers, "workers", default_workers)?,
                distance,
                tol,
            };
            let csv = cmd_ensemble(&cfg)?;
            write_output(s.path(&args.optimizer.out, "out")?.as_deref(), &csv)?;
        }
        Command::Scenario(args) => {
            let report = cmd_scenario(args)?;
            write_output(None, &to_json(&report))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
