//! Command-line front end for the `weakmetro` estimation engine.

pub mod model_file;
pub mod output;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use weakmetro::dynamics::{dynamic_report, linear_grid, scan_time};
use weakmetro::models::{build, ModelKind, ModelSpec, DEFAULT_FOCK_DIM};
use weakmetro::oracle::{exact_evolved_family, exact_ground_family, fd_qfim, DEFAULT_STEP};
use weakmetro::statics::{analyze_static, qfim_static, uhlmann_static};
use weakmetro::{PerturbationProblem, StateVector};

use crate::model_file::HamiltonianFile;
use crate::output::{DynamicOutput, OracleOutput, OracleRow, ScanOutput, ScanRow, StaticOutput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Engine(#[from] weakmetro::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use weakmetro::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Engine(e) => match e {
                E::NotSquare { .. }
                | E::Empty
                | E::NonFinite { .. }
                | E::NotHermitian { .. }
                | E::DimensionMismatch { .. }
                | E::LevelOutOfRange { .. }
                | E::ParameterOutOfRange { .. }
                | E::NoPerturbations
                | E::InvalidArgument(_) => 2,
                _ => 3,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "weakmetro", version, about = "Precision limits for estimating weak Hamiltonian couplings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leading-order report for the perturbed eigenstate.
    Static(StaticArgs),
    /// Leading-order report for the evolved probe at one time.
    Dynamic(DynamicArgs),
    /// Dynamical report on a time grid.
    Scan(ScanArgs),
    /// Engine against exact diagonalization and finite differences.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Preset (qubit, qubit2, qutrit, anharmonic) or path to a JSON Hamiltonian file.
    #[arg(long)]
    pub model: String,
    /// Angle between the two couplings of qubit2 and qutrit, in radians.
    #[arg(long, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Oscillator Fock-space dimension.
    #[arg(long, default_value_t = DEFAULT_FOCK_DIM)]
    pub fock_dim: usize,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Polar angle of the qubit probe, in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Azimuthal angle of the qubit probe, in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StaticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long)]
    pub time: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long, default_value_t = 0.05)]
    pub t_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub t_max: f64,
    #[arg(long, default_value_t = 200)]
    pub t_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub probe: ProbeArgs,
    /// Couplings, comma separated; defaults to 1e-3 for each.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    /// Also check the dynamical scheme at this time.
    #[arg(long)]
    pub time: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Static(a) => &a.output,
            Command::Dynamic(a) => &a.output,
            Command::Scan(a) => &a.output,
            Command::OracleCheck(a) => &a.output,
        }
    }
}

/// A built problem plus the probe used by the dynamical commands.
pub struct Loaded {
    pub name: String,
    pub problem: PerturbationProblem,
    spec: Option<ModelSpec>,
    file_probe: Option<StateVector>,
}

impl Loaded {
    fn probe(&self, args: &ProbeArgs) -> Result<StateVector, CliError> {
        finite("theta", args.theta)?;
        finite("phi", args.phi)?;
        match (&self.spec, &self.file_probe) {
            (Some(spec), _) => Ok(spec.probe_state(args.theta, args.phi)?),
            (None, Some(p)) => Ok(p.clone()),
            (None, None) => Ok(self.problem.unperturbed_state()),
        }
    }
}

fn finite(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be finite")))
    }
}

pub fn load(args: &ModelArgs) -> Result<Loaded, CliError> {
    finite("alpha", args.alpha)?;
    let kind = match args.model.as_str() {
        "qubit" => Some(ModelKind::Qubit1Param),
        "qubit2" => Some(ModelKind::Qubit2Param),
        "qutrit" => Some(ModelKind::Qutrit2Param),
        "anharmonic" => Some(ModelKind::Anharmonic2Param),
        _ => None,
    };
    match kind {
        Some(kind) => {
            let spec = ModelSpec::new(kind).with_alpha(args.alpha).with_fock_dim(args.fock_dim);
            let problem = build(&spec)?;
            Ok(Loaded {
                name: args.model.clone(),
                problem,
                spec: Some(spec),
                file_probe: None,
            })
        }
        None => {
            let file = HamiltonianFile::read(std::path::Path::new(&args.model))?;
            Ok(Loaded {
                name: args.model.clone(),
                problem: file.problem()?,
                spec: None,
                file_probe: file.probe()?,
            })
        }
    }
}

fn run_static(args: &StaticArgs) -> Result<StaticOutput, CliError> {
    let m = load(&args.model)?;
    let a = analyze_static(&m.problem)?;
    Ok(StaticOutput::new(&m, &a))
}

fn run_dynamic(args: &DynamicArgs) -> Result<DynamicOutput, CliError> {
    finite("time", args.time)?;
    let m = load(&args.model)?;
    let psi = m.probe(&args.probe)?;
    let r = dynamic_report(&m.problem, &psi, args.time)?;
    Ok(DynamicOutput::new(&m, args.time, &r))
}

fn run_scan(args: &ScanArgs) -> Result<ScanOutput, CliError> {
    let m = load(&args.model)?;
    let psi = m.probe(&args.probe)?;
    let times = linear_grid(args.t_min, args.t_max, args.t_steps)?;
    let scan = scan_time(&m.problem, &psi, &times)?;
    let rows = scan
        .times
        .iter()
        .zip(scan.reports)
        .map(|(&t, r)| Ok(ScanRow::new(t, &r?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ScanOutput {
        model: m.name,
        static_reference: scan.static_reference,
        rows,
    })
}

fn run_oracle(args: &OracleArgs) -> Result<OracleOutput, CliError> {
    let m = load(&args.model)?;
    let p = &m.problem;
    let lambda = match &args.lambda {
        Some(l) => l.clone(),
        None => vec![1e-3; p.parameter_count()],
    };
    if lambda.len() != p.parameter_count() {
        return Err(CliError::Validation(format!(
            "--lambda needs {} values, got {}",
            p.parameter_count(),
            lambda.len()
        )));
    }
    for l in &lambda {
        finite("lambda", *l)?;
    }
    let mut rows = Vec::new();
    let cs = p.corrections()?;
    let (q_fd, d_fd) = fd_qfim(exact_ground_family(p), &lambda, DEFAULT_STEP)?;
    rows.extend(OracleRow::compare("static", &qfim_static(&cs)?, &uhlmann_static(&cs)?, &q_fd, &d_fd));
    if let Some(t) = args.time {
        finite("time", t)?;
        let psi = m.probe(&args.probe)?;
        let r = dynamic_report(p, &psi, t)?;
        let (q_fd, d_fd) = fd_qfim(exact_evolved_family(p, &psi, t), &lambda, DEFAULT_STEP)?;
        rows.extend(OracleRow::compare(&format!("dynamic t={t}"), &r.qfim, &r.uhlmann, &q_fd, &d_fd));
    }
    Ok(OracleOutput {
        model: m.name,
        lambda,
        rows,
    })
}

/// Runs one command and renders its result in the requested format.
pub fn run(command: &Command) -> Result<String, CliError> {
    let format = command.output().output_format;
    Ok(match command {
        Command::Static(a) => run_static(a)?.render(format),
        Command::Dynamic(a) => run_dynamic(a)?.render(format),
        Command::Scan(a) => run_scan(a)?.render(format)?,
        Command::OracleCheck(a) => run_oracle(a)?.render(format),
    })
}

/// Runs a command and delivers its output. Returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = run(&cli.command).and_then(|text| match &cli.command.output().out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
