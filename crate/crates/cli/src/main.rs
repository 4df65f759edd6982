//! `ocp2d`: command-line access to the plasma library.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid or inadmissible configuration,
//! 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ocp2d_core::experiment::{
    run_experiment, ClusterSpec, ExperimentConfig, ExperimentKind, ExperimentOutput, SystemSpec,
};
use ocp2d_core::freeenergy::{
    correlation_energy, ginibre_log_z_asymptotic, ginibre_log_z_exact, log_z_pinned_particles, multihole_prediction,
    neutral_particles, KernelMode,
};
use ocp2d_core::kernel::{BackgroundScale, GinibreKernel, IndexConvention};
use ocp2d_core::meanfield::{emf_energy, emf_gradient, emf_split_difference, MeanFieldProblem};
use ocp2d_core::oracle::{mc_coulomb, mc_partition, Disk};
use ocp2d_core::{Complex64, Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ocp2d",
    version,
    about = "Two-dimensional one-component plasma with pinned charges"
)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the Monte Carlo generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format of experiment tables; other commands always print JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation kernel values.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Mean-field energies of the punctured droplet.
    #[command(subcommand)]
    Meanfield(MeanfieldCommand),
    /// Exact and asymptotic free energies.
    #[command(subcommand)]
    Freeenergy(FreeenergyCommand),
    /// Sweeps over the scale grid.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Independent Monte Carlo and quadrature checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum KernelCommand {
    /// Evaluates K(z, w).
    Eval {
        #[arg(long)]
        n: f64,
        /// Point as `x,y`.
        #[arg(long, value_parser = parse_point)]
        z: Complex64,
        #[arg(long, value_parser = parse_point)]
        w: Complex64,
        /// Finite kernel with this many particles; the infinite kernel when absent.
        #[arg(long, conflicts_with = "top")]
        particles: Option<usize>,
        /// Finite kernel with this top index.
        #[arg(long)]
        top: Option<usize>,
    },
}

/// A system given by flags when no `--config` is passed.
#[derive(Args, Debug, Clone)]
struct SystemArgs {
    /// Background scale N.
    #[arg(long)]
    n: Option<f64>,
    /// Charge c of a lattice cluster; repeat for several clusters.
    #[arg(long = "charge")]
    charges: Vec<f64>,
    /// Centre `x,y` of each lattice cluster, in the order of `--charge`.
    #[arg(long = "center", value_parser = parse_pair)]
    centers: Vec<[f64; 2]>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Finite,
    Infinite,
}

impl From<ModeArg> for KernelMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Finite => KernelMode::Finite,
            ModeArg::Infinite => KernelMode::Infinite,
        }
    }
}

#[derive(Subcommand, Debug)]
enum MeanfieldCommand {
    /// Mean-field energy with J = N.
    Energy(SystemArgs),
    /// Gradient of the energy in the translation of one cluster.
    Gradient {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Energy of two holes minus the two single-hole energies.
    Split(SystemArgs),
}

#[derive(Subcommand, Debug)]
enum FreeenergyCommand {
    /// ln Z of J free particles at scale N.
    Exact {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        n: f64,
    },
    /// Asymptotic -ln Z of J free particles at scale N.
    Asymptotic {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        n: f64,
    },
    /// Exact ln Z with pinned clusters, with the correlation energy when defined.
    Pinned(SystemArgs),
    /// Predicted F_corr(all) - sum F_corr(j).
    Prediction {
        #[arg(long)]
        n: f64,
        /// Cluster charges, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        charges: Vec<f64>,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum ExperimentCommand {
    Translate,
    Rotate,
    Decouple,
    Multihole,
    GinibreAsymptotics,
}

impl From<ExperimentCommand> for ExperimentKind {
    fn from(c: ExperimentCommand) -> Self {
        match c {
            ExperimentCommand::Translate => ExperimentKind::Translate,
            ExperimentCommand::Rotate => ExperimentKind::Rotate,
            ExperimentCommand::Decouple => ExperimentKind::Decouple,
            ExperimentCommand::Multihole => ExperimentKind::Multihole,
            ExperimentCommand::GinibreAsymptotics => ExperimentKind::GinibreAsymptotics,
        }
    }
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Runs every oracle cross-check.
    Battery {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
    /// Monte Carlo ln Z for a few mobile particles.
    McPartition {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 2)]
        particles: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Monte Carlo Coulomb energy of two disks.
    McCoulomb {
        /// Disk `x,y,r`.
        #[arg(long, value_parser = parse_disk)]
        a: Disk,
        #[arg(long, value_parser = parse_disk)]
        b: Disk,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
}

fn parse_numbers(s: &str, count: usize) -> std::result::Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    if values.len() != count {
        return Err(format!(
            "expected {count} comma-separated numbers, got {}",
            values.len()
        ));
    }
    Ok(values)
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let v = parse_numbers(s, 2)?;
    Ok([v[0], v[1]])
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let [x, y] = parse_pair(s)?;
    Ok(Complex64::new(x, y))
}

fn parse_disk(s: &str) -> std::result::Result<Disk, String> {
    let v = parse_numbers(s, 3)?;
    Disk::new(Complex64::new(v[0], v[1]), v[2]).map_err(|e| e.to_string())
}

const DEFAULT_SEED: u64 = 20_240_611;

enum Outcome {
    Passed,
    Failed,
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"), out)
}

fn system_from(cli: &Cli, args: &SystemArgs) -> Result<SystemSpec> {
    let mut spec = match &cli.config {
        Some(path) => SystemSpec::from_json(&read_config(path)?)?,
        None => {
            let scale = args
                .n
                .ok_or_else(|| Error::InvalidConfig("pass --n or --config".into()))?;
            if args.centers.len() > args.charges.len() {
                return Err(Error::InvalidConfig("more --center than --charge values".into()));
            }
            let clusters = args
                .charges
                .iter()
                .enumerate()
                .map(|(i, &c)| ClusterSpec::lattice(c, args.centers.get(i).copied().unwrap_or([0.0, 0.0])))
                .collect();
            SystemSpec {
                scale,
                clusters,
                particles: None,
                kernel_mode: KernelMode::Finite,
            }
        }
    };
    if let Some(mode) = args.mode {
        spec.kernel_mode = mode.into();
    }
    Ok(spec)
}

fn mean_field_problem(spec: &SystemSpec) -> Result<MeanFieldProblem> {
    let scale = spec.background()?;
    let charge = spec.particles.map_or(scale.value(), |p| p as f64);
    MeanFieldProblem::new(scale, charge, spec.resolve()?)
}

fn run_kernel(cmd: &KernelCommand, out: Option<&Path>) -> Result<Outcome> {
    let KernelCommand::Eval {
        n,
        z,
        w,
        particles,
        top,
    } = cmd;
    let scale = BackgroundScale::new(*n)?;
    let kernel = match (particles, top) {
        (Some(p), _) => GinibreKernel::for_particles(scale, *p)?,
        (None, Some(t)) => GinibreKernel::finite(scale, *t),
        (None, None) => GinibreKernel::infinite(scale),
    };
    let value = kernel.eval(*z, *w)?;
    let c = value.to_complex();
    emit_json(
        &json!({
            "order": kernel.order(),
            "index_convention": IndexConvention::RESOLVED.describe(),
            "log_mag": value.log_mag(),
            "phase": value.phase(),
            "re": c.re,
            "im": c.im,
        }),
        out,
    )?;
    Ok(Outcome::Passed)
}

fn run_meanfield(cli: &Cli, cmd: &MeanfieldCommand, out: Option<&Path>) -> Result<Outcome> {
    let value = match cmd {
        MeanfieldCommand::Energy(args) => {
            serde_json::to_value(emf_energy(&mean_field_problem(&system_from(cli, args)?)?)?)?
        }
        MeanfieldCommand::Gradient { system, index } => {
            let g = emf_gradient(&mean_field_problem(&system_from(cli, system)?)?, *index)?;
            json!({ "index": index, "d_dx": g.re, "d_dy": g.im })
        }
        MeanfieldCommand::Split(args) => {
            serde_json::to_value(emf_split_difference(&mean_field_problem(&system_from(cli, args)?)?)?)?
        }
    };
    emit_json(&value, out)?;
    Ok(Outcome::Passed)
}

fn run_freeenergy(cli: &Cli, cmd: &FreeenergyCommand, out: Option<&Path>) -> Result<Outcome> {
    let value = match cmd {
        FreeenergyCommand::Exact { j, n } => {
            json!({ "j": j, "n": n, "log_z": ginibre_log_z_exact(*j, BackgroundScale::new(*n)?)? })
        }
        FreeenergyCommand::Asymptotic { j, n } => {
            let scale = BackgroundScale::new(*n)?;
            let a = ginibre_log_z_asymptotic(*j, scale)?;
            json!({
                "j": j,
                "n": n,
                "minus_log_z": a.value,
                "minus_log_z_exact": -ginibre_log_z_exact(*j, scale)?,
                "series": a.series,
                "mismatch": a.mismatch,
            })
        }
        FreeenergyCommand::Pinned(args) => {
            let spec = system_from(cli, args)?;
            let scale = spec.background()?;
            let clusters = spec.resolve()?;
            let particles = match spec.particles {
                Some(p) => p,
                None => neutral_particles(scale)?,
            };
            let report = log_z_pinned_particles(&clusters, particles, scale, spec.kernel_mode)?;
            let correlation = if particles as f64 == scale.value() {
                match correlation_energy(&clusters, scale, spec.kernel_mode) {
                    Ok(c) => json!({ "f_corr": c.f_corr, "mean_field_energy": c.mean_field.energy }),
                    Err(e) if e.is_configuration_error() => json!({ "unavailable": e.to_string() }),
                    Err(e) => return Err(e),
                }
            } else {
                Value::Null
            };
            json!({
                "index_convention": IndexConvention::RESOLVED.describe(),
                "report": report,
                "correlation": correlation,
            })
        }
        FreeenergyCommand::Prediction { n, charges } => {
            let total: f64 = charges.iter().sum();
            serde_json::to_value(multihole_prediction(*n, total, charges)?)?
        }
    };
    emit_json(&value, out)?;
    Ok(Outcome::Passed)
}

fn finish_experiment(output: &ExperimentOutput, format: Format, out: Option<&Path>) -> Result<Outcome> {
    let text = match format {
        Format::Csv => output.to_csv()?,
        Format::Json => output.to_json()?,
    };
    emit(&text, out)?;
    for failed in output.failed_checks() {
        eprintln!("check failed: {failed}");
    }
    Ok(if output.passed() {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}

fn run_experiment_command(cli: &Cli, cmd: ExperimentCommand) -> Result<Outcome> {
    let kind = ExperimentKind::from(cmd);
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_json(kind, &read_config(path)?)?,
        None => ExperimentConfig::preset(kind),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    let output = run_experiment(&config)?;
    finish_experiment(&output, cli.format.unwrap_or(Format::Csv), config.output.as_deref())
}

fn run_oracle(cli: &Cli, cmd: &OracleCommand, out: Option<&Path>) -> Result<Outcome> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cmd {
        OracleCommand::Battery {
            samples,
            tolerance_scale,
        } => {
            let mut config = match &cli.config {
                Some(path) => ExperimentConfig::from_json(ExperimentKind::OracleBattery, &read_config(path)?)?,
                None => ExperimentConfig::preset(ExperimentKind::OracleBattery),
            };
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            if let Some(s) = samples {
                config.samples = *s;
            }
            if let Some(t) = tolerance_scale {
                config.tolerance_scale = *t;
            }
            let output = run_experiment(&config)?;
            finish_experiment(&output, cli.format.unwrap_or(Format::Json), out)
        }
        OracleCommand::McPartition {
            system,
            particles,
            samples,
        } => {
            let spec = match (&cli.config, system.n) {
                (None, None) => SystemSpec {
                    scale: 1.0,
                    clusters: Vec::new(),
                    particles: None,
                    kernel_mode: KernelMode::Finite,
                },
                _ => system_from(cli, system)?,
            };
            let scale = spec.background()?;
            let clusters = spec.resolve()?;
            let estimate = mc_partition(*particles, &clusters, scale, *samples, seed)?;
            let exact = log_z_pinned_particles(&clusters, *particles, scale, KernelMode::Finite)?;
            emit_json(
                &json!({
                    "estimate": estimate.estimate,
                    "stderr": estimate.stderr,
                    "samples": estimate.samples,
                    "seed": estimate.seed,
                    "generator_name": estimate.generator_name,
                    "bias_warning": estimate.bias_warning,
                    "exact_log_z": exact.log_z.log_mag(),
                }),
                out,
            )?;
            Ok(Outcome::Passed)
        }
        OracleCommand::McCoulomb { a, b, samples } => {
            let estimate = mc_coulomb(a, b, *samples, seed)?;
            emit_json(&serde_json::to_value(estimate)?, out)?;
            Ok(Outcome::Passed)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Kernel(cmd) => run_kernel(cmd, out),
        Command::Meanfield(cmd) => run_meanfield(cli, cmd, out),
        Command::Freeenergy(cmd) => run_freeenergy(cli, cmd, out),
        Command::Experiment(cmd) => run_experiment_command(cli, *cmd),
        Command::Oracle(cmd) => run_oracle(cli, cmd, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration_error() { 2 } else { 3 })
        }
    }
}
