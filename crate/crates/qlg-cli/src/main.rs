//! Command-line front end for the quantum lattice gas runs: configures the
//! experiments, executes them, and emits manifests and CSV series for
//! external plotting. All outputs are deterministic for a fixed
//! configuration and seed.

mod runner;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use runner::{DispersionConfig, Experiment, RunConfig};

#[derive(Parser)]
#[command(
    name = "qlg",
    version,
    about = "1+1D quantum lattice gas simulations of Dirac particles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write a manifest plus CSV time series.
    Run(RunArgs),
    /// Tabulate the grid-level dispersion relation as CSV.
    Dispersion(DispersionArgs),
    /// Run the gate-algebra self tests and write a residual report.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExperimentArg {
    Free,
    SquareWell,
    Harmonic,
    Kernel,
    GatesSelftest,
    ManyBody,
}

#[derive(Args)]
struct RunArgs {
    /// Which experiment to run.
    #[arg(long, value_enum)]
    experiment: Option<ExperimentArg>,
    /// Optional key = value configuration file; flags win over file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of lattice sites.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of evolution steps (for the kernel experiment: N).
    #[arg(long)]
    steps: Option<u64>,
    /// Record observables every this many steps.
    #[arg(long)]
    record_every: Option<u64>,
    /// Particle mass (inner mass for the square well).
    #[arg(long)]
    mass: Option<f64>,
    /// Barrier mass outside the square well.
    #[arg(long)]
    barrier_mass: Option<f64>,
    /// Square well width in lattice units.
    #[arg(long)]
    well_length: Option<f64>,
    /// Oscillator stiffness kappa.
    #[arg(long)]
    kappa: Option<f64>,
    /// Oscillator level n.
    #[arg(long)]
    level: Option<usize>,
    /// Lorentz factor for uniform free runs.
    #[arg(long)]
    gamma: Option<f64>,
    /// Net displacement M for the kernel experiment.
    #[arg(long)]
    magnetization: Option<i64>,
    /// Seed for randomized initial data and suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DispersionArgs {
    #[arg(long, default_value_t = 0.5)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Number of sampled wave numbers in [0, pi/ell].
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value = "qlg-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "qlg-out")]
    out: PathBuf,
}

fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not `key = value`: {raw}", lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn lookup<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(raw) => match raw.parse::<T>() {
            Ok(v) => Ok(Some(v)),
            Err(e) => bail!("config key {key}: cannot parse {raw:?}: {e}"),
        },
    }
}

fn resolve_run_config(args: RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let experiment = match args.experiment {
        Some(e) => e,
        None => match file.get("experiment").map(String::as_str) {
            Some("free") => ExperimentArg::Free,
            Some("square-well") | Some("square_well") => ExperimentArg::SquareWell,
            Some("harmonic") => ExperimentArg::Harmonic,
            Some("kernel") => ExperimentArg::Kernel,
            Some("gates-selftest") | Some("gates_selftest") => ExperimentArg::GatesSelftest,
            Some("many-body") | Some("many_body") => ExperimentArg::ManyBody,
            Some(other) => bail!("unknown experiment {other:?} in config file"),
            None => bail!("no experiment given (flag --experiment or config key)"),
        },
    };
    let grid = args.grid.or(lookup(&file, "grid")?);
    let steps = args.steps.or(lookup(&file, "steps")?);
    let record_every = args.record_every.or(lookup(&file, "record-every")?);
    let mass = args.mass.or(lookup(&file, "mass")?);
    let barrier_mass = args.barrier_mass.or(lookup(&file, "barrier-mass")?);
    let well_length = args.well_length.or(lookup(&file, "well-length")?);
    let kappa = args.kappa.or(lookup(&file, "kappa")?);
    let level = args.level.or(lookup(&file, "level")?);
    let gamma = args.gamma.or(lookup(&file, "gamma")?);
    let magnetization = args.magnetization.or(lookup(&file, "magnetization")?);
    let seed = args.seed.or(lookup(&file, "seed")?).unwrap_or(1);
    let out = args
        .out
        .or(file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qlg-out"));

    let experiment = match experiment {
        ExperimentArg::Free => Experiment::Free {
            grid: grid.unwrap_or(256),
            steps: steps.unwrap_or(10_000),
            mass: mass.unwrap_or(0.5),
            gamma: gamma.unwrap_or(1.2),
        },
        ExperimentArg::SquareWell => Experiment::SquareWell {
            grid: grid.unwrap_or(256),
            steps: steps.unwrap_or(200),
            well_sites: well_length.unwrap_or(220.0).round() as usize,
            inner_mass: mass.unwrap_or(0.1),
            barrier_mass: barrier_mass.unwrap_or(1.0),
        },
        ExperimentArg::Harmonic => {
            let grid_points = grid.unwrap_or(1024);
            Experiment::Harmonic {
                grid: grid_points,
                steps: steps.unwrap_or(20_000),
                mass: mass.unwrap_or(0.5),
                kappa: kappa.unwrap_or(0.01 / (grid_points as f64 * grid_points as f64)),
                level: level.unwrap_or(0),
            }
        }
        ExperimentArg::Kernel => Experiment::Kernel {
            n_steps: steps.unwrap_or(9) as usize,
            magnetization: magnetization.unwrap_or(3),
            mass: mass.unwrap_or(0.3),
        },
        ExperimentArg::GatesSelftest => Experiment::GatesSelftest,
        ExperimentArg::ManyBody => Experiment::ManyBody {
            sites: grid.unwrap_or(8),
            steps: steps.unwrap_or(100),
            mass: mass.unwrap_or_else(|| 0.3f64.asin()),
        },
    };
    Ok(RunConfig {
        experiment,
        record_every: record_every.unwrap_or(10).max(1),
        seed,
        out,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => resolve_run_config(args).and_then(|config| runner::run(&config)),
        Command::Dispersion(args) => runner::emit_dispersion_table(&DispersionConfig {
            mass: args.mass,
            ell: args.ell,
            tau: args.tau,
            samples: args.samples,
            out: args.out,
        }),
        Command::Selftest(args) => runner::run(&RunConfig {
            experiment: Experiment::GatesSelftest,
            record_every: 1,
            seed: args.seed,
            out: args.out,
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": format!("{err:#}"),
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
