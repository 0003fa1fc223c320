//! Batch front-end behind the `tactoid` binary.
//!
//! Every command resolves its arguments into a [`RunConfig`], runs one
//! pipeline and writes `<command>.json` (the report, with the resolved
//! config embedded), CSV tables and optional SVG plots into the output
//! directory. Wall-clock data goes to `<command>.meta.json` so the report
//! itself is reproducible byte for byte in serial mode.

use std::f64::consts::PI;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{
    gamma_convergence_table, large_volume_sweep, ode_check, small_volume_sweep,
    OptimizedShape, SmallVolumeOptions, SweepOptions, SweepResult,
};
use crate::diagnostics::{diagnose, dyadic_radii, DiagnosticsReport};
use crate::energy::{baseline_gamma0, e0, e_eps, e_v, total_energy, EnergyOptions, EnergyReport};
use crate::field::{self, Clip, SolveOptions};
use crate::geometry::{io, CosineBump, CuspedSemicircle, Gamma0, GraphCurve, Grid, Semicircle, SpectralForm};
use crate::optimize::{el_residual, minimize, Checkpoint, ElResidual, Functional, OptimConfig, OptimResult, ShapeParams};
use crate::plot::{line_plot, Scale, Series};

/// Exit status of a run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("dirichlet energy does not converge under refinement ({0})")]
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(crate::Error::SolverFailure { .. } | crate::Error::DegenerateDomain(_)) => EXIT_SOLVER,
            CliError::Core(_) => EXIT_VALIDATION,
            CliError::Diverged(_) => EXIT_DIVERGED,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Core(e) => e.kind(),
            CliError::Diverged(_) => "diverged",
        }
    }

    /// One-line JSON record: `{"error":kind,"exit_code":n,"message":..}`.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Energy,
    Optimize,
    Diagnose,
    Asymptotics,
    Baseline,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Energy => "energy",
            Command::Optimize => "optimize",
            Command::Diagnose => "diagnose",
            Command::Asymptotics => "asymptotics",
            Command::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepArg {
    Small,
    Large,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalArg {
    /// `∫|∇Θ|² + l` at area `v` (default `v = 1`).
    P,
    /// `E_v`.
    Ev,
    /// `E_ε`.
    Eps,
    /// `E₀`.
    E0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Uniform,
    Cosine,
    Arc,
}

impl From<SpacingArg> for Grid {
    fn from(s: SpacingArg) -> Grid {
        match s {
            SpacingArg::Uniform => Grid::Uniform,
            SpacingArg::Cosine => Grid::Cosine,
            SpacingArg::Arc => Grid::Arc,
        }
    }
}

/// Command-line arguments.
#[derive(Debug, Clone, Parser)]
#[command(name = "tactoid", version, about = "Shape optimization of two-dimensional nematic droplets")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Curve file: CSV samples (`x,y`) or a spectral record (`.json`).
    #[arg(long, conflicts_with = "builtin")]
    pub curve: Option<PathBuf>,
    /// gamma0, semicircle, cosine, cusped:EPS or profile_g.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Field grid `NXxNY`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Node spacing along the base.
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
    /// Volume parameter; a comma list for the large-volume sweep.
    #[arg(long, value_delimiter = ',')]
    pub v: Vec<f64>,
    /// Aspect parameter(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Number of cosine modes.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Optimizer gradient tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative residual target of the linear solver.
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum)]
    pub functional: Option<FunctionalArg>,
    #[arg(long, value_enum)]
    pub sweep: Option<SweepArg>,
    /// Also run the optimizer inside the asymptotic sweeps.
    #[arg(long)]
    pub optimize: bool,
    /// Write a curve checkpoint every N optimizer iterations.
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    /// Output directory (overridden by TACTOID_OUT).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub plots: bool,
    /// Single worker thread; reports are then byte-reproducible.
    #[arg(long)]
    pub serial: bool,
    /// Worker threads (default: all cores).
    #[arg(long, conflicts_with = "serial")]
    pub threads: Option<usize>,
    /// Treat a non-convergent Dirichlet energy as an error (exit 3).
    #[arg(long)]
    pub divergence_error: bool,
    /// Skip the refinement study of energy reports.
    #[arg(long)]
    pub no_divergence_check: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Where the curve comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Builtin(Builtin),
    Path(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    Gamma0,
    Semicircle,
    Cosine,
    Cusped { eps: f64 },
    ProfileG,
}

impl std::str::FromStr for Builtin {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "gamma0" => Ok(Builtin::Gamma0),
            "semicircle" => Ok(Builtin::Semicircle),
            "cosine" => Ok(Builtin::Cosine),
            "profile_g" => Ok(Builtin::ProfileG),
            _ => match s.strip_prefix("cusped:") {
                Some(e) => {
                    let eps: f64 = e
                        .parse()
                        .map_err(|_| CliError::Validation(format!("bad cusp parameter `{e}`")))?;
                    if !(eps > 0.0 && eps < 0.25) {
                        return invalid(format!("cusped:eps needs 0 < eps < 1/4, got {eps}"));
                    }
                    Ok(Builtin::Cusped { eps })
                }
                None => invalid(format!("unknown builtin `{s}`")),
            },
        }
    }
}

impl Builtin {
    pub fn sample(self, n: usize, grid: Grid) -> crate::Result<GraphCurve> {
        match self {
            Builtin::Gamma0 => GraphCurve::sample(&Gamma0, n, grid),
            Builtin::Semicircle => GraphCurve::sample(&Semicircle::default(), n, grid),
            Builtin::Cosine => GraphCurve::sample(&CosineBump::unit(), n, grid),
            Builtin::Cusped { eps } => GraphCurve::sample(&CuspedSemicircle::new(eps)?, n, grid),
            Builtin::ProfileG => GraphCurve::sample(&CosineBump::small_volume_minimizer(), n, grid),
        }
    }

    /// Natural starting coefficients in the optimizer family, if any.
    fn shape_params(self, k: usize) -> Option<ShapeParams> {
        match self {
            Builtin::Cosine => Some(ShapeParams::cosine(k, 1.0)),
            Builtin::ProfileG => Some(ShapeParams::cosine(k, PI.powf(-2.0 / 3.0))),
            _ => None,
        }
    }

    fn default_grid(self) -> Grid {
        match self {
            Builtin::Gamma0 => Grid::Uniform,
            Builtin::Cusped { .. } => Grid::Arc,
            _ => Grid::Cosine,
        }
    }
}

/// Fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub curve: Option<CurveSource>,
    pub grid: (usize, usize),
    pub spacing: Grid,
    pub v: Vec<f64>,
    pub eps: Vec<f64>,
    pub k: usize,
    pub tol: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
    pub functional: Option<Functional>,
    pub sweep: Option<SweepArg>,
    pub optimize: bool,
    pub checkpoint_every: Option<usize>,
    pub emit_plots: bool,
    pub serial: bool,
    pub threads: Option<usize>,
    pub divergence_error: bool,
    pub divergence_check: bool,
    pub seed: u64,
    /// Not part of the serialized record: it would tie reports to a path.
    #[serde(skip)]
    pub out: PathBuf,
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::Validation(format!("grid must look like NXxNY, got `{s}`")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Validation(format!("bad grid size `{t}`")))
    };
    Ok((parse(a)?, parse(b)?))
}

impl RunConfig {
    /// Validates `args` and fills in per-command defaults. `env_out` is the
    /// value of `TACTOID_OUT`, which takes precedence over `--out`.
    pub fn resolve(args: &Args, env_out: Option<&str>) -> Result<Self, CliError> {
        let command = args.command;
        let curve = match (&args.curve, &args.builtin) {
            (Some(p), _) => Some(CurveSource::Path(p.clone())),
            (None, Some(b)) => Some(CurveSource::Builtin(b.parse()?)),
            (None, None) => None,
        };
        if curve.is_none() && matches!(command, Command::Solve | Command::Energy | Command::Diagnose) {
            return invalid(format!("`{}` needs --curve or --builtin", command.name()));
        }
        let default_grid = match command {
            Command::Baseline => (1025, 257),
            Command::Asymptotics if args.sweep == Some(SweepArg::Large) => (1025, 257),
            Command::Optimize => (513, 129),
            _ => (513, 129),
        };
        let grid = match &args.grid {
            Some(g) => parse_grid(g)?,
            None => default_grid,
        };
        let (min_x, min_eta) = field::MIN_RESOLUTION;
        if grid.0 < min_x || grid.1 < min_eta {
            return invalid(format!("grid must be at least {min_x}x{min_eta}, got {}x{}", grid.0, grid.1));
        }
        let spacing = match (args.spacing, &curve) {
            (Some(s), _) => s.into(),
            (None, Some(CurveSource::Builtin(b))) => b.default_grid(),
            (None, _) if command == Command::Asymptotics && args.sweep == Some(SweepArg::Large) => Grid::Arc,
            (None, _) => Grid::Cosine,
        };
        for &v in &args.v {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("v must be positive and finite, got {v}"));
            }
        }
        for &e in &args.eps {
            if !(e >= 0.0 && e <= 1.0) {
                return invalid(format!("eps must lie in [0, 1], got {e}"));
            }
        }
        if args.v.len() > 1 && !(command == Command::Asymptotics && args.sweep == Some(SweepArg::Large)) {
            return invalid("a list of v values is only accepted by `asymptotics --sweep large`");
        }
        if args.eps.len() > 1 && command != Command::Asymptotics {
            return invalid("a list of eps values is only accepted by `asymptotics`");
        }
        let k = args.k.unwrap_or(if command == Command::Optimize { 16 } else { 8 });
        if k == 0 || k > 64 {
            return invalid(format!("K must lie in 1..=64, got {k}"));
        }
        let tol = args.tol.unwrap_or(1e-5);
        let solver_tol = args.solver_tol.unwrap_or(1e-10);
        if !(tol > 0.0) || !(solver_tol > 0.0 && solver_tol < 1.0) {
            return invalid("tolerances must be positive (solver tolerance below 1)");
        }
        let max_iter = args.max_iter.unwrap_or(200);
        if max_iter == 0 {
            return invalid("max-iter must be positive");
        }
        if args.threads == Some(0) {
            return invalid("threads must be positive");
        }
        let functional = match command {
            Command::Optimize | Command::Energy => Some(resolve_functional(args)?),
            _ => None,
        };
        if command == Command::Asymptotics && args.sweep.is_none() {
            return invalid("`asymptotics` needs --sweep small|large|gamma");
        }
        if args.sweep.is_some() && command != Command::Asymptotics {
            return invalid("--sweep only applies to `asymptotics`");
        }
        let out = env_out
            .filter(|s| !s.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| args.out.clone());
        Ok(RunConfig {
            command,
            curve,
            grid,
            spacing,
            v: args.v.clone(),
            eps: args.eps.clone(),
            k,
            tol,
            solver_tol,
            max_iter,
            functional,
            sweep: args.sweep,
            optimize: args.optimize,
            checkpoint_every: args.checkpoint_every,
            emit_plots: args.plots,
            serial: args.serial,
            threads: args.threads,
            divergence_error: args.divergence_error,
            divergence_check: !args.no_divergence_check,
            seed: args.seed,
            out,
        })
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions::default().with_n_eta(self.grid.1).with_tol(self.solver_tol)
    }

    fn energy_options(&self) -> EnergyOptions {
        EnergyOptions {
            solve: self.solve_options(),
            divergence_check: self.divergence_check,
        }
    }

    fn load_curve(&self) -> Result<GraphCurve, CliError> {
        match &self.curve {
            Some(CurveSource::Builtin(b)) => Ok(b.sample(self.grid.0, self.spacing)?),
            Some(CurveSource::Path(p)) => Ok(io::load(p, self.grid.0, self.spacing)?),
            None => invalid("no curve given"),
        }
    }
}

fn resolve_functional(args: &Args) -> Result<Functional, CliError> {
    let single = |xs: &[f64], name: &str| -> Result<Option<f64>, CliError> {
        match xs {
            [] => Ok(None),
            [x] => Ok(Some(*x)),
            _ => invalid(format!("expected a single {name}")),
        }
    };
    let v = single(&args.v, "v")?;
    let eps = single(&args.eps, "eps")?;
    let which = args.functional.unwrap_or(match (v, eps) {
        (_, Some(_)) => FunctionalArg::Eps,
        (Some(_), None) if args.command == Command::Energy => FunctionalArg::Ev,
        _ => FunctionalArg::P,
    });
    Ok(match which {
        FunctionalArg::P => Functional::ProblemP { v: v.unwrap_or(1.0) },
        FunctionalArg::Ev => Functional::Ev {
            v: v.ok_or_else(|| CliError::Validation("E_v needs --v".into()))?,
        },
        FunctionalArg::Eps => {
            let eps = eps.ok_or_else(|| CliError::Validation("E_eps needs --eps".into()))?;
            if !(eps > 0.0) {
                return invalid("E_eps needs eps > 0");
            }
            Functional::Eps { eps }
        }
        FunctionalArg::E0 => Functional::E0,
    })
}

/// Report envelope: the resolved config next to the command's payload.
#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    tactoid_version: &'static str,
    config: &'a RunConfig,
    result: T,
}

/// Wall-clock sidecar; kept apart from the reproducible report.
#[derive(Debug, Serialize)]
struct Metadata {
    command: &'static str,
    started_unix_s: f64,
    elapsed_s: f64,
    threads: usize,
    files: Vec<String>,
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
    plots: bool,
}

impl Output {
    fn new(dir: &Path, plots: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(crate::Error::from)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            plots,
        })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<fs::File>, CliError> {
        self.files.push(name.to_string());
        let file = fs::File::create(self.dir.join(name)).map_err(crate::Error::from)?;
        Ok(BufWriter::new(file))
    }

    fn json<T: Serialize>(&mut self, name: &str, config: &RunConfig, result: T) -> Result<(), CliError> {
        let report = Report {
            tactoid_version: env!("CARGO_PKG_VERSION"),
            config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(crate::Error::from)?;
        text.push('\n');
        self.text(name, &text)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.files.push(name.to_string());
        fs::write(self.dir.join(name), text).map_err(crate::Error::from)?;
        Ok(())
    }

    fn svg(&mut self, name: &str, svg: impl FnOnce() -> String) -> Result<(), CliError> {
        if self.plots {
            self.text(name, &svg())?;
        }
        Ok(())
    }
}

/// Parses the process arguments, runs, and returns the exit status. Errors
/// are printed to stderr as a single JSON line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let err = CliError::Validation(e.to_string().lines().next().unwrap_or("").trim().to_string());
            eprintln!("{}", err.record());
            return err.exit_code();
        }
    };
    let env_out = std::env::var("TACTOID_OUT").ok();
    let result = RunConfig::resolve(&args, env_out.as_deref()).and_then(|c| run(&c));
    match result {
        Ok(dir) => {
            println!("{}", dir.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

/// Runs the configured pipeline; returns the output directory.
pub fn run(config: &RunConfig) -> Result<PathBuf, CliError> {
    let threads = if config.serial { Some(1) } else { config.threads };
    let pool = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let started = SystemTime::now();
    let clock = Instant::now();
    let mut out = Output::new(&config.out, config.emit_plots)?;
    let status = pool.install(|| dispatch(config, &mut out));
    let meta = Metadata {
        command: config.command.name(),
        started_unix_s: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        elapsed_s: clock.elapsed().as_secs_f64(),
        threads: pool.current_num_threads(),
        files: out.files.clone(),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(crate::Error::from)?;
    fs::write(config.out.join(format!("{}.meta.json", config.command.name())), text + "\n")
        .map_err(crate::Error::from)?;
    status.map(|_| config.out.clone())
}

fn dispatch(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    match config.command {
        Command::Solve => run_solve(config, out),
        Command::Energy => run_energy(config, out),
        Command::Optimize => run_optimize(config, out),
        Command::Diagnose => run_diagnose(config, out),
        Command::Asymptotics => run_asymptotics(config, out),
        Command::Baseline => run_baseline(config, out),
    }
}

#[derive(Debug, Serialize)]
struct SolveResult {
    field: field::FieldMetadata,
    dirichlet: f64,
    green_identity: field::GreenCheck,
    perimeter: f64,
    volume: f64,
}

fn run_solve(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let curve = config.load_curve()?;
    let f = field::solve_harmonic(&curve, &config.solve_options())?;
    let green = f.green_identity()?;
    f.write_csv(out.create("field.csv")?)?;
    out.json(
        "solve.json",
        config,
        SolveResult {
            field: f.metadata(),
            dirichlet: f.dirichlet_energy(),
            green_identity: green,
            perimeter: curve.perimeter(),
            volume: curve.volume(),
        },
    )?;
    let trace = f.dtn_trace()?;
    out.svg("solve.svg", || {
        line_plot(
            "boundary data and normal derivative",
            Scale::Linear,
            Scale::Linear,
            &[
                Series {
                    name: "theta on curve",
                    xs: curve.xs(),
                    ys: f.top_trace(),
                },
                Series {
                    name: "normal derivative",
                    xs: &trace.xs,
                    ys: &trace.normal,
                },
            ],
            &[],
        )
    })
}

fn run_energy(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let curve = config.load_curve()?;
    let opts = config.energy_options();
    let report: EnergyReport = match config.functional.expect("resolved") {
        Functional::ProblemP { v } => total_energy(&curve, &opts, Some(v))?,
        Functional::Ev { v } => e_v(&curve, v, &opts)?,
        Functional::Eps { eps } => e_eps(&curve, eps, &opts)?,
        Functional::E0 => e0(&curve),
    };
    out.json("energy.json", config, &report)?;
    io::write_csv(&curve, out.create("curve.csv")?)?;
    if report.diverged && config.divergence_error {
        let ratio = report.divergence.as_ref().map(|s| s.increment_ratio).unwrap_or(f64::NAN);
        return Err(CliError::Diverged(format!("increment ratio {ratio:.3}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OptimizeResult {
    optimization: OptimResult,
    /// Final curve on the finest grid, in the functional's normalization.
    energy: Option<EnergyReport>,
    el_residual_uniform: Option<ElResidual>,
    diagnostics: DiagnosticsReport,
}

fn start_params(config: &RunConfig) -> Result<ShapeParams, CliError> {
    match &config.curve {
        None => Ok(Builtin::Cosine.shape_params(config.k).expect("cosine start")),
        Some(CurveSource::Builtin(b)) => b
            .shape_params(config.k)
            .ok_or_else(|| CliError::Validation("optimize starts from `cosine`, `profile_g` or a spectral record".into())),
        Some(CurveSource::Path(p)) => {
            if p.extension().is_none_or(|e| e != "json") {
                return invalid("optimize needs a spectral record (.json) as start");
            }
            let form: SpectralForm = io::read_spectral(fs::File::open(p).map_err(crate::Error::from)?)?;
            if form.a != 1.0 {
                return invalid("spectral start must have a = 1");
            }
            Ok(ShapeParams::new(form.a, form.coefficients))
        }
    }
}

fn run_optimize(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let functional = config.functional.expect("resolved");
    let start = start_params(config)?;
    let opt = OptimConfig {
        functional,
        k: config.k,
        grid: config.grid,
        levels: 2,
        tol: config.tol,
        max_iter: config.max_iter,
        solver_tol: config.solver_tol,
        clip_margin: None,
        seed: config.seed,
        checkpoint: config.checkpoint_every.map(|every| Checkpoint {
            every,
            dir: config.out.join("checkpoints"),
        }),
    };
    let result = minimize(&start, &opt)?;
    let curve = result.params.curve(config.grid.0, Grid::Uniform)?;
    let solve = config.solve_options();
    let (energy, el) = match functional {
        Functional::E0 => (Some(e0(&curve)), None),
        f => {
            let e = config.energy_options();
            let report = match f {
                Functional::ProblemP { v } => total_energy(&curve, &e, Some(v))?,
                Functional::Ev { v } => e_v(&curve, v, &e)?,
                Functional::Eps { eps } => e_eps(&curve, eps, &e)?,
                Functional::E0 => unreachable!(),
            };
            (Some(report), Some(el_residual(&curve, f, &solve)?))
        }
    };
    let fine = result.params.curve(config.grid.0, Grid::Cosine)?;
    let fine = fine.to_parametric(config.grid.0)?;
    let diagnostics = diagnose(&fine, &dyadic_radii(&fine, 8))?;
    io::write_csv(&curve, out.create("curve.csv")?)?;
    io::write_spectral(&result.params.form(), out.create("spectral.json")?)?;
    write_trace(&result, out.create("trace.csv")?)?;
    out.svg("optimize.svg", || {
        let it: Vec<f64> = result.trace.iter().map(|r| r.iteration as f64).collect();
        let gn: Vec<f64> = result.trace.iter().map(|r| r.gradient_norm).collect();
        line_plot(
            "optimizer trace",
            Scale::Linear,
            Scale::Log,
            &[Series {
                name: "gradient norm",
                xs: &it,
                ys: &gn,
            }],
            &[format!("energy {:.10}", result.energy)],
        )
    })?;
    out.svg("shape.svg", || {
        line_plot(
            "optimized shape",
            Scale::Linear,
            Scale::Linear,
            &[Series {
                name: "f",
                xs: curve.xs(),
                ys: curve.fs(),
            }],
            &[],
        )
    })?;
    out.json(
        "optimize.json",
        config,
        OptimizeResult {
            optimization: result,
            energy,
            el_residual_uniform: el,
            diagnostics,
        },
    )
}

fn write_trace<W: std::io::Write>(result: &OptimResult, writer: W) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "level", "energy", "gradient_norm", "volume", "step"])?;
    for r in &result.trace {
        w.write_record([
            r.iteration.to_string(),
            r.level.to_string(),
            format!("{:.17e}", r.energy),
            format!("{:.17e}", r.gradient_norm),
            format!("{:.17e}", r.volume),
            format!("{:.17e}", r.step),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run_diagnose(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let curve = config.load_curve()?;
    let p = curve.to_parametric(config.grid.0)?;
    let report = diagnose(&p, &dyadic_radii(&p, 8))?;
    report.vanishing_modulus.write_csv(out.create("vanishing_modulus.csv")?)?;
    report.vmo_table.write_csv(out.create("vmo.csv")?)?;
    report.cusp_table.write_csv(out.create("cusp.csv")?)?;
    report.weil_petersson.beta_levels.write_csv(out.create("beta_levels.csv")?)?;
    out.svg("diagnose.svg", || {
        let r = &report.vanishing_modulus.r;
        line_plot(
            "scale tables",
            Scale::Log,
            Scale::Log,
            &[
                Series {
                    name: "vanishing modulus",
                    xs: r,
                    ys: &report.vanishing_modulus.value,
                },
                Series {
                    name: "vmo",
                    xs: &report.vmo_table.r,
                    ys: &report.vmo_table.value,
                },
                Series {
                    name: "cusp left",
                    xs: &report.cusp_table.r,
                    ys: &report.cusp_table.left,
                },
            ],
            &[],
        )
    })?;
    out.json("diagnose.json", config, &report)
}

#[derive(Debug, Serialize)]
struct AsymptoticsResult {
    sweep: SweepResult,
    ode_residual: Option<f64>,
}

fn run_asymptotics(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let sweep = match config.sweep.expect("resolved") {
        SweepArg::Large => {
            let v_list = if config.v.is_empty() {
                vec![1e4, 1e5, 1e6, 1e7, 1e8]
            } else {
                config.v.clone()
            };
            let opts = SweepOptions {
                n_xi: config.grid.0,
                grid: config.spacing,
                energy: config.energy_options(),
            };
            let optimized = if config.optimize {
                let opt = OptimConfig {
                    functional: Functional::Ev { v: 1e6 },
                    k: config.k,
                    grid: (257, 65),
                    tol: config.tol,
                    max_iter: config.max_iter,
                    ..Default::default()
                };
                let r = minimize(&ShapeParams::cosine(config.k, 1.0), &opt)?;
                vec![OptimizedShape { v: 1e6, params: r.params }]
            } else {
                vec![]
            };
            large_volume_sweep(&v_list, &opts, &optimized)?
        }
        SweepArg::Small => {
            let eps = if config.eps.is_empty() {
                vec![0.2, 0.1, 0.05, 0.025]
            } else {
                config.eps.clone()
            };
            let mut opts = SmallVolumeOptions::default();
            opts.sweep.n_xi = config.grid.0;
            opts.sweep.energy.solve = config.solve_options().with_clip(Clip::default());
            opts.optimize = config.optimize;
            opts.k = config.k;
            small_volume_sweep(&eps, &opts)?
        }
        SweepArg::Gamma => {
            let curve = match &config.curve {
                Some(_) => config.load_curve()?,
                None => Builtin::ProfileG.sample(config.grid.0, Grid::Uniform)?,
            };
            let eps = if config.eps.is_empty() {
                vec![0.0, 0.2, 0.1, 0.05, 0.02, 0.01]
            } else {
                config.eps.clone()
            };
            gamma_convergence_table(&curve, &eps, &config.energy_options())?
        }
    };
    sweep.write_csv(out.create("sweep.csv")?)?;
    out.svg("sweep.svg", || sweep.svg())?;
    let ode = (config.sweep == Some(SweepArg::Small)).then(|| ode_check(2001));
    out.json(
        "asymptotics.json",
        config,
        AsymptoticsResult {
            sweep,
            ode_residual: ode,
        },
    )
}

fn run_baseline(config: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let report = baseline_gamma0(config.grid.0, &config.solve_options())?;
    out.json("baseline.json", config, &report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("tactoid").chain(list.iter().copied())).unwrap()
    }

    #[test]
    fn builtins_parse() {
        assert_eq!("cusped:0.1".parse::<Builtin>().unwrap(), Builtin::Cusped { eps: 0.1 });
        assert!("cusped:0.3".parse::<Builtin>().is_err());
        assert!("ellipse".parse::<Builtin>().is_err());
    }

    #[test]
    fn grid_and_env_override() {
        let c = RunConfig::resolve(&args(&["energy", "--builtin", "cosine", "--grid", "65x17"]), Some("/tmp/x")).unwrap();
        assert_eq!(c.grid, (65, 17));
        assert_eq!(c.out, PathBuf::from("/tmp/x"));
        assert!(RunConfig::resolve(&args(&["energy", "--builtin", "cosine", "--grid", "65by17"]), None).is_err());
    }

    #[test]
    fn validation_errors_exit_1() {
        let e = RunConfig::resolve(&args(&["energy"]), None).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
        let e = RunConfig::resolve(&args(&["optimize", "--v=-1"]), None).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
        assert!(!e.record().contains('\n'));
    }
}
