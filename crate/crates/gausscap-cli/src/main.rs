//! `gausscap` — Gaussian capacity of phase-sensitive bosonic channels from
//! the command line.
//!
//! The tool wraps the `gausscap` library in five subcommands:
//!
//! * `capacity` — solve one channel/budget pair and print the full optimal
//!   encoding.
//! * `sweep` — solve a one-parameter family and emit a table, with the
//!   energy/frequency threshold marked when it falls inside the range.
//! * `classify` — name the shape of the capacity-vs-`omega_env` curve and
//!   locate its interior extrema.
//! * `zones` — rasterize scenario labels over the `(tau, y)` plane at a
//!   fixed photon budget.
//! * `verify` — run the built-in self-check suite (frozen reference values
//!   plus a reduced solver-vs-oracle sweep); no network, no data files.
//!
//! Output is CSV (default) or JSON via `--format`, to stdout or to
//! `--output`. Every number prints at 12 significant digits; re-parsing an
//! emitted CSV and re-emitting it reproduces the bytes exactly. JSON
//! payloads carry a metadata header with the tool version and the full
//! invocation echo.
//!
//! Exit codes: `0` success, `1` failed self-check, `2` invalid or
//! unphysical parameters (the message names the violated constraint),
//! `3` solver failure (the message carries the solver diagnostics).
//!
//! `GAUSSCAP_THREADS=<n>` caps the worker-thread count of the data-parallel
//! paths; unset means one worker per core. Builds without the `parallel`
//! feature run sequentially and ignore the variable.

mod emit;
mod verify;
mod zones;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gausscap::{
    capacity, classify_scenario, sweep_capacity, EnergyBudget, Error, FiducialChannel, NoiseSpec,
    Scale, SolverConfig, SweepFamily, SweepParam,
};
use serde_json::{json, Value};

/// Process-level failure, carrying the documented exit code.
#[derive(Debug)]
enum CliError {
    /// Invalid or unphysical parameters: exit code 2.
    Invalid(String),
    /// The solver gave up: exit code 3.
    Solver(String),
    /// `verify` found failing checks: exit code 1.
    Verify { failed: usize, total: usize },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{msg}"),
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
            CliError::Verify { failed, total } => {
                write!(f, "self-check failed: {failed} of {total} checks")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            // Both arise after validation passed: the numerics themselves
            // gave up. Everything else is a rejected input.
            Error::NoBracket { .. } | Error::NoConvergence { .. } => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify { .. } => 1,
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gausscap",
    version,
    about = "Gaussian capacity of single-mode phase-sensitive bosonic channels",
    long_about = "Computes the Gaussian classical capacity of channels acting on a one-mode \
                  covariance matrix as V -> |tau| V + y diag(1/omega_env, omega_env), under a \
                  mean photon budget n_bar on the modulated input. Exit codes: 0 success, \
                  1 failed self-check, 2 invalid or unphysical parameters, 3 solver failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel/budget pair and print the full optimal encoding.
    Capacity(CapacityArgs),
    /// Solve a one-parameter family of capacity problems and emit a table.
    Sweep(SweepArgs),
    /// Classify the capacity-vs-omega_env curve shape and locate extrema.
    Classify(ClassifyArgs),
    /// Rasterize scenario labels over the (tau, y) plane at fixed n_bar.
    Zones(ZonesArgs),
    /// Run the built-in self-check suite; exits nonzero on any failure.
    Verify(VerifyArgs),
}

/// The environment noise, given either as an occupation or directly as a
/// strength. Exactly one of the two flags must be present.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct NoiseArgs {
    /// Environment occupation m_env >= 0; the noise strength follows as
    /// y = |1 - tau| (m_env + 1/2) (for tau = 1: y = m_env).
    #[arg(long)]
    m_env: Option<f64>,
    /// Total noise strength y >= |1 - tau| / 2 directly.
    #[arg(long)]
    y: Option<f64>,
}

impl NoiseArgs {
    fn channel(&self, tau: f64, omega_env: f64) -> gausscap::Result<FiducialChannel> {
        match (self.m_env, self.y) {
            (Some(m), None) => FiducialChannel::from_m_env(tau, m, omega_env),
            (None, Some(y)) => FiducialChannel::from_y(tau, y, omega_env),
            _ => unreachable!("clap enforces exactly one of --m-env/--y"),
        }
    }

    /// The noise strength `y`, validated against the complete-positivity
    /// floor. The strength is `omega_env`-independent, so any frequency
    /// serves for the construction.
    fn strength(&self, tau: f64) -> gausscap::Result<f64> {
        self.channel(tau, 1.0).map(|ch| ch.y())
    }
}

/// Solver controls shared by every command that runs the transcendental
/// below-threshold branch.
#[derive(Args)]
struct SolverArgs {
    /// Absolute bisection tolerance on the optimal input frequency.
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Iteration cap for the bisection.
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Number of points in the geometric bracketing scan.
    #[arg(long, default_value_t = 64)]
    bracket_grid: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            abs_tol: self.abs_tol,
            max_iter: self.max_iter,
            bracket_grid: self.bracket_grid,
        }
    }

    fn echo(&self) -> Value {
        json!({
            "abs_tol": self.abs_tol,
            "max_iter": self.max_iter,
            "bracket_grid": self.bracket_grid,
        })
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where and how the result table is written.
#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError::Invalid(format!("cannot write `{}`: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn echo(&self) -> Value {
        json!({
            "format": self.format.name(),
            "output": self.output.as_ref().map(|p| p.display().to_string()),
        })
    }
}

#[derive(Args)]
struct CapacityArgs {
    /// Transmissivity tau: negative = phase-conjugating, |tau| > 1 = gain,
    /// tau = 0 degenerate (capacity 0).
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Environment frequency; values > 1 are canonicalized to 1/omega_env
    /// by a quadrature swap.
    #[arg(long, default_value_t = 1.0)]
    omega_env: f64,
    /// Mean photon budget for the modulated input.
    #[arg(long)]
    n_bar: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

/// Parameter choices for `sweep --param`.
#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ParamName {
    Tau,
    Y,
    MEnv,
    OmegaEnv,
    NBar,
}

impl ParamName {
    fn to_lib(self) -> SweepParam {
        match self {
            ParamName::Tau => SweepParam::Tau,
            ParamName::Y => SweepParam::Y,
            ParamName::MEnv => SweepParam::MEnv,
            ParamName::OmegaEnv => SweepParam::OmegaEnv,
            ParamName::NBar => SweepParam::NBar,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

impl ScaleArg {
    fn to_lib(self) -> Scale {
        match self {
            ScaleArg::Linear => Scale::Linear,
            ScaleArg::Log => Scale::Log,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScaleArg::Linear => "linear",
            ScaleArg::Log => "log",
        }
    }
}

/// Like [`NoiseArgs`] but optional as a whole: a sweep over `y` or `m-env`
/// supplies the noise through the swept values instead.
#[derive(Args)]
#[group(required = false, multiple = false)]
struct FixedNoiseArgs {
    /// Fixed environment occupation (forbidden when --param m-env or y).
    #[arg(long)]
    m_env: Option<f64>,
    /// Fixed noise strength (forbidden when --param m-env or y).
    #[arg(long)]
    y: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Which parameter the sweep varies.
    #[arg(long, value_enum)]
    param: ParamName,
    /// Lower end of the swept range (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    lo: f64,
    /// Upper end of the swept range (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    hi: f64,
    /// Number of grid points (>= 2), endpoints included.
    #[arg(long)]
    steps: usize,
    /// Spacing of the swept values.
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    scale: ScaleArg,
    /// Fixed transmissivity (forbidden when --param tau).
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[command(flatten)]
    noise: FixedNoiseArgs,
    /// Fixed environment frequency (forbidden when --param omega-env;
    /// default 1 otherwise).
    #[arg(long)]
    omega_env: Option<f64>,
    /// Fixed photon budget (forbidden when --param n-bar).
    #[arg(long)]
    n_bar: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

impl SweepArgs {
    /// Builds the sweep family, enforcing that the swept parameter is not
    /// also fixed and that every remaining parameter is determined.
    fn family(&self) -> Result<SweepFamily, CliError> {
        let param = self.param.to_lib();
        let fixed = |flag: &str| {
            CliError::Invalid(format!(
                "{flag} fixes the swept parameter; drop the flag or sweep a different one"
            ))
        };
        match param {
            SweepParam::Tau if self.tau.is_some() => return Err(fixed("--tau")),
            SweepParam::OmegaEnv if self.omega_env.is_some() => return Err(fixed("--omega-env")),
            SweepParam::NBar if self.n_bar.is_some() => return Err(fixed("--n-bar")),
            SweepParam::Y | SweepParam::MEnv
                if self.noise.m_env.is_some() || self.noise.y.is_some() =>
            {
                return Err(fixed("--m-env/--y"))
            }
            _ => {}
        }
        // Placeholder values below are ignored by the sweep for the swept
        // parameter itself.
        let tau = match param {
            SweepParam::Tau => 0.0,
            _ => self.tau.ok_or_else(|| {
                CliError::Invalid("--tau is required unless it is the swept parameter".into())
            })?,
        };
        let noise = match param {
            SweepParam::Y | SweepParam::MEnv => NoiseSpec::Y(0.0),
            _ => match (self.noise.m_env, self.noise.y) {
                (Some(m), None) => NoiseSpec::MEnv(m),
                (None, Some(y)) => NoiseSpec::Y(y),
                _ => {
                    return Err(CliError::Invalid(
                        "exactly one of --m-env/--y is required unless the noise is the swept \
                         parameter"
                            .into(),
                    ))
                }
            },
        };
        let omega_env = match param {
            SweepParam::OmegaEnv => 1.0,
            _ => self.omega_env.unwrap_or(1.0),
        };
        let n_bar = match param {
            SweepParam::NBar => 0.0,
            _ => self.n_bar.ok_or_else(|| {
                CliError::Invalid("--n-bar is required unless it is the swept parameter".into())
            })?,
        };
        Ok(SweepFamily {
            param,
            lo: self.lo,
            hi: self.hi,
            steps: self.steps,
            scale: self.scale.to_lib(),
            tau,
            noise,
            omega_env,
            n_bar,
        })
    }
}

#[derive(Args)]
struct ClassifyArgs {
    /// Transmissivity tau.
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Mean photon budget for the modulated input.
    #[arg(long)]
    n_bar: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ZonesArgs {
    /// Lower edge of the tau range.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau_lo: f64,
    /// Upper edge of the tau range.
    #[arg(long, default_value_t = 1.6, allow_negative_numbers = true)]
    tau_hi: f64,
    /// Number of tau grid points (>= 2), endpoints included.
    #[arg(long, default_value_t = 65)]
    tau_steps: usize,
    /// Lower edge of the y range (>= 0).
    #[arg(long, default_value_t = 0.0)]
    y_lo: f64,
    /// Upper edge of the y range.
    #[arg(long, default_value_t = 0.8)]
    y_hi: f64,
    /// Number of y grid points (>= 2), endpoints included.
    #[arg(long, default_value_t = 41)]
    y_steps: usize,
    /// Mean photon budget for the modulated input.
    #[arg(long)]
    n_bar: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {}

/// Applies the `GAUSSCAP_THREADS` cap to the global worker pool before any
/// parallel work runs.
fn configure_threads() -> Result<(), CliError> {
    let raw = match std::env::var("GAUSSCAP_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => {
            return Err(CliError::Invalid(format!(
                "GAUSSCAP_THREADS must be a positive integer: {e}"
            )))
        }
    };
    let threads: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => {
            return Err(CliError::Invalid(format!(
                "GAUSSCAP_THREADS must be a positive integer, got `{raw}`"
            )))
        }
    };
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        // Only possible if a pool already exists; the cap is then moot.
        log::warn!("GAUSSCAP_THREADS ignored: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    log::info!("sequential build: GAUSSCAP_THREADS={threads} has no effect");
    Ok(())
}

fn metadata(config: Value) -> Value {
    json!({
        "tool": "gausscap",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    })
}

fn run_capacity(a: CapacityArgs) -> Result<(), CliError> {
    let ch = a.noise.channel(a.tau, a.omega_env)?;
    let budget = EnergyBudget::new(a.n_bar)?;
    let sol = capacity(&ch, &budget, &a.solver.config())?;
    let text = match a.out.format {
        Format::Csv => emit::solution_csv(&sol),
        Format::Json => {
            let config = json!({
                "command": "capacity",
                "tau": a.tau,
                "m_env": a.noise.m_env,
                "y": a.noise.y,
                "omega_env": a.omega_env,
                "n_bar": a.n_bar,
                "solver": a.solver.echo(),
                "out": a.out.echo(),
            });
            emit::solution_json(metadata(config), &sol)
        }
    };
    a.out.write(&text)
}

fn run_sweep(a: SweepArgs) -> Result<(), CliError> {
    let family = a.family()?;
    let table = sweep_capacity(&family, &a.solver.config())?;
    let text = match a.out.format {
        Format::Csv => emit::sweep_csv(&table),
        Format::Json => {
            let config = json!({
                "command": "sweep",
                "param": emit::param_name(family.param),
                "lo": a.lo,
                "hi": a.hi,
                "steps": a.steps,
                "scale": a.scale.name(),
                "tau": a.tau,
                "m_env": a.noise.m_env,
                "y": a.noise.y,
                "omega_env": a.omega_env,
                "n_bar": a.n_bar,
                "solver": a.solver.echo(),
                "out": a.out.echo(),
            });
            emit::sweep_json(metadata(config), &table)
        }
    };
    a.out.write(&text)
}

fn run_classify(a: ClassifyArgs) -> Result<(), CliError> {
    let y = a.noise.strength(a.tau)?;
    let scenario = classify_scenario(a.tau, y, a.n_bar)?;
    let text = match a.out.format {
        Format::Csv => emit::scenario_csv(&scenario),
        Format::Json => {
            let config = json!({
                "command": "classify",
                "tau": a.tau,
                "m_env": a.noise.m_env,
                "y": a.noise.y,
                "n_bar": a.n_bar,
                "out": a.out.echo(),
            });
            emit::scenario_json(metadata(config), &scenario)
        }
    };
    a.out.write(&text)
}

fn run_zones(a: ZonesArgs) -> Result<(), CliError> {
    let grid = zones::rasterize(
        a.tau_lo,
        a.tau_hi,
        a.tau_steps,
        a.y_lo,
        a.y_hi,
        a.y_steps,
        a.n_bar,
    )?;
    let text = match a.out.format {
        Format::Csv => emit::zones_csv(&grid),
        Format::Json => {
            let config = json!({
                "command": "zones",
                "tau_lo": a.tau_lo,
                "tau_hi": a.tau_hi,
                "tau_steps": a.tau_steps,
                "y_lo": a.y_lo,
                "y_hi": a.y_hi,
                "y_steps": a.y_steps,
                "n_bar": a.n_bar,
                "out": a.out.echo(),
            });
            emit::zones_json(metadata(config), &grid)
        }
    };
    a.out.write(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity(a) => run_capacity(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Classify(a) => run_classify(a),
        Command::Zones(a) => run_zones(a),
        Command::Verify(VerifyArgs {}) => verify::run(),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
