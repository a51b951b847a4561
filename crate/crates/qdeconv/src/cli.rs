//! Command-line front end. Exit codes: 0 success, 2 configuration or input
//! error, 3 deconvolution failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdeconv_core::pmf::discretize;
use qdeconv_core::sim;
use qdeconv_core::{
    DeconvProblem, DiscretizationRule, DistributionSpec, GateBasis, OptimizerConfig, Pmf,
};
use thiserror::Error;

use crate::bench::{self, BenchError, DeconvPath, ExperimentConfig, Method};
use crate::formats::{self, FormatError};
use crate::parallel::{factorize_parallel, trust_region_parallel};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("deconvolution failed: {0}")]
    Deconvolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Deconvolution(_) => 3,
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Deconvolution { .. } => CliError::Deconvolution(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qdeconv", version, about = "Deconvolution-based quantum state preparation")]
pub struct Cli {
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretize a distribution into a PMF (JSON array).
    Discretize(TargetArgs),
    /// Split a PMF into factors.
    Deconvolve(DeconvolveArgs),
    /// Build a loading circuit and print its JSON netlist.
    Build(BuildArgs),
    /// Simulate a netlist and sample its measured qubits.
    Simulate(SimulateArgs),
    /// Run an experiment config and print the metrics report.
    Bench(BenchArgs),
    /// Depth of direct and deconvolved preparations per register width (CSV).
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Laplace,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Pointwise,
    CellIntegral,
}

/// Target PMF: a JSON file, or a distribution to discretize.
#[derive(Debug, Args)]
pub struct TargetArgs {
    /// JSON array of probabilities; overrides the distribution flags.
    #[arg(long)]
    pub pmf: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub location: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 7)]
    pub points: usize,
    #[arg(long, default_value_t = DistributionSpec::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    #[arg(long, value_enum, default_value = "pointwise")]
    pub rule: RuleArg,
}

impl TargetArgs {
    fn spec(&self) -> DistributionSpec {
        let base = match self.family {
            FamilyArg::Gaussian => DistributionSpec::gaussian(self.location, self.scale, self.points),
            FamilyArg::Laplace => DistributionSpec::laplace(self.location, self.scale, self.points),
        };
        let rule = match self.rule {
            RuleArg::Pointwise => DiscretizationRule::Pointwise,
            RuleArg::CellIntegral => DiscretizationRule::CellIntegral,
        };
        base.with_half_width(self.half_width).with_rule(rule)
    }

    fn load(&self) -> Result<Pmf, CliError> {
        match &self.pmf {
            Some(path) => serde_json::from_str(&read(path)?).map_err(config_err),
            None => discretize(&self.spec()).map_err(config_err),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DeconvMethodArg {
    Trust,
    Poly,
}

impl From<DeconvMethodArg> for DeconvPath {
    fn from(m: DeconvMethodArg) -> Self {
        match m {
            DeconvMethodArg::Trust => DeconvPath::TrustRegion,
            DeconvMethodArg::Poly => DeconvPath::Polynomial,
        }
    }
}

#[derive(Debug, Args)]
pub struct DeconvolveArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, default_value = "trust")]
    pub method: DeconvMethodArg,
    /// Independent restarts; the default depends on the method.
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration trace CSV of the winning trust-region restart.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BuildMethodArg {
    Deconv,
    Gr,
    GrVchain,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Coarse,
    Hardware,
}

impl From<BasisArg> for GateBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Coarse => GateBasis::Coarse,
            BasisArg::Hardware => GateBasis::Hardware,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, default_value = "deconv")]
    pub method: BuildMethodArg,
    /// Lower into this basis; omit to keep multi-controlled gates.
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Deconvolution path for `--method deconv`.
    #[arg(long, value_enum, default_value = "trust")]
    pub deconv_method: DeconvMethodArg,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit OpenQASM 2 (implies the hardware basis).
    #[arg(long)]
    pub qasm: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Netlist JSON produced by `build`.
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, default_value_t = bench::DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the exact measured marginal instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Raw shot log CSV.
    #[arg(long)]
    pub shot_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment config JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also report the square root of each JS distance.
    #[arg(long)]
    pub js_sqrt: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "hardware")]
    pub basis: BasisArg,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(config_err)
}

fn format_err(e: FormatError) -> CliError {
    config_err(e)
}

/// Runs one parsed command and returns its primary output.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Discretize(target) => json(&target.load()?),
        Command::Deconvolve(args) => deconvolve(args),
        Command::Build(args) => build(args),
        Command::Simulate(args) => simulate(args),
        Command::Bench(args) => {
            let mut cfg: ExperimentConfig = serde_json::from_str(&read(&args.config)?).map_err(config_err)?;
            cfg.js_sqrt |= args.js_sqrt;
            let report = bench::run_experiment(&cfg)?;
            if let Some(path) = &args.csv {
                let mut buf = Vec::new();
                report.write_csv(&mut buf).map_err(config_err)?;
                write_file(path, &buf)?;
            }
            json(&report)
        }
        Command::Sweep(args) => {
            if args.n_min > args.n_max {
                return Err(CliError::Config("--n-min exceeds --n-max".into()));
            }
            let ns: Vec<usize> = (args.n_min..=args.n_max).collect();
            let rows = bench::depth_scaling_sweep(&ns, args.basis.into())?;
            let mut buf = Vec::new();
            bench::write_sweep_csv(&mut buf, &rows).map_err(config_err)?;
            String::from_utf8(buf).map_err(config_err)
        }
    }
}

fn deconvolve(args: &DeconvolveArgs) -> Result<String, CliError> {
    let target = args.target.load()?;
    let path = DeconvPath::from(args.method);
    if args.restarts == Some(0) {
        return Err(CliError::Config("--restarts must be at least 1".into()));
    }
    match path {
        DeconvPath::TrustRegion => {
            let problem = DeconvProblem::split(target);
            let config = OptimizerConfig {
                seed: args.seed,
                ..OptimizerConfig::default()
            };
            let restarts = args.restarts.unwrap_or(bench::DEFAULT_TRUST_RESTARTS);
            let result = trust_region_parallel(&problem, &config, restarts)
                .map_err(|e| CliError::Deconvolution(e.to_string()))?;
            if let Some(path) = &args.trace {
                let mut buf = Vec::new();
                formats::write_trace(&mut buf, &result.trace).map_err(format_err)?;
                write_file(path, &buf)?;
            }
            json(&result)
        }
        DeconvPath::Polynomial => {
            let restarts = args.restarts.unwrap_or(bench::DEFAULT_POLY_RESTARTS);
            let result = factorize_parallel(&target, restarts, args.seed)
                .map_err(|e| CliError::Deconvolution(e.to_string()))?;
            json(&result)
        }
    }
}

fn build(args: &BuildArgs) -> Result<String, CliError> {
    let target = args.target.load()?;
    let method = match args.method {
        BuildMethodArg::Deconv => Method::Deconvolution,
        BuildMethodArg::Gr => Method::Gr,
        BuildMethodArg::GrVchain => Method::GrVChain,
    };
    let mut cfg = ExperimentConfig::new(args.target.spec());
    cfg.deconv_path = args.deconv_method.into();
    cfg.restarts = args.restarts;
    cfg.seed = args.seed;
    cfg.validate()?;
    let prepared = bench::prepare(method, &target, &cfg)?;
    let basis = if args.qasm { Some(GateBasis::Hardware) } else { args.basis.map(GateBasis::from) };
    let circuit = match basis {
        Some(b) => prepared.circuit.transpile(b),
        None => prepared.circuit,
    };
    if args.qasm {
        return circuit.to_qasm().map_err(config_err);
    }
    formats::circuit_to_json(&circuit).map(|s| s + "\n").map_err(format_err)
}

fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let circuit = formats::circuit_from_json(&read(&args.circuit)?).map_err(format_err)?;
    let state = sim::run(&circuit).map_err(config_err)?;
    let measured = circuit.measured();
    if args.exact {
        return json(&state.marginal(measured).map_err(config_err)?);
    }
    if args.shots == 0 {
        return Err(CliError::Config("--shots must be at least 1".into()));
    }
    let outcomes = state
        .sample_outcomes(measured, args.shots as usize, args.seed)
        .map_err(config_err)?;
    if let Some(path) = &args.shot_log {
        let mut buf = Vec::new();
        formats::write_shot_log(&mut buf, &outcomes).map_err(format_err)?;
        write_file(path, &buf)?;
    }
    json(&sim::EmpiricalPmf::from_outcomes(1 << measured.len(), &outcomes))
}

/// Parses `std::env::args`, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli.command).and_then(|text| match &cli.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(config_err),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
