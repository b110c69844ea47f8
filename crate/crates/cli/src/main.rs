//! `swe`: run, validate and list the shallow-water experiments.

mod config;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpsbp::operators::parse_operator;
use dpsbp::swe1d::BcKind;
use serde_json::json;

use config::{output_dir, resolve, ConfigError, Experiment, OperatorSpec, RunConfig};

#[derive(Parser)]
#[command(name = "swe", version, about = "Dual-pairing SBP shallow water experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run(RunArgs),
    /// Check a configuration and print it with defaults resolved.
    Validate(RunArgs),
    /// Print the experiment registry as JSON.
    ListExperiments,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Operator label such as `dp6`, `drp4` or `sbp4`.
    #[arg(long)]
    operator: Option<String>,
    /// Cells (bounded) or points per direction (periodic).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_bc)]
    bc: Option<BcKind>,
    /// Hyper-viscosity pre-factor δ.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Named suite for `--experiment convergence`.
    #[arg(long)]
    suite: Option<String>,
    /// Output directory (default: $SWE_OUT_DIR/<experiment>, else runs/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_bc(s: &str) -> Result<BcKind, String> {
    match s {
        "mass_flux" => Ok(BcKind::MassFlux),
        "velocity_flux" => Ok(BcKind::VelocityFlux),
        "transmissive" => Ok(BcKind::Transmissive),
        _ => Err(format!("unknown bc '{s}' (mass_flux, velocity_flux, transmissive)")),
    }
}

enum Failure {
    Config(ConfigError),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn from_core(e: dpsbp::Error) -> Self {
        use dpsbp::Error as E;
        match e {
            E::Io(_) | E::InvalidData(_) => Failure::Io(e.to_string()),
            E::UnsupportedOrder { .. }
            | E::GridTooSmall { .. }
            | E::BadRamp(_)
            | E::BadPenalty(_)
            | E::InvalidArgument(_)
            | E::NotSubcritical { .. }
            | E::DimensionTooLarge(_) => Failure::Config(ConfigError::problem(e.to_string())),
            _ => Failure::Numerical(e.to_string()),
        }
    }

    fn record(&self) -> serde_json::Value {
        match self {
            Failure::Config(c) => json!({
                "status": "error",
                "kind": "ConfigInvalid",
                "message": c.message(),
                "missing": c.missing,
                "problems": c.problems,
            }),
            Failure::Numerical(m) => json!({ "status": "error", "kind": "NumericalFailure", "message": m }),
            Failure::Io(m) => json!({ "status": "error", "kind": "IoError", "message": m }),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_path(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Some(e) = args.experiment {
        cfg.experiment = Some(e);
    }
    if let Some(label) = &args.operator {
        let (family, order) =
            parse_operator(label).map_err(|e| Failure::Config(ConfigError::problem(e.to_string())))?;
        cfg.operator = Some(OperatorSpec {
            family: family.name().to_string(),
            order,
        });
    }
    if let Some(n) = args.n {
        cfg.grid.n = Some(n);
        cfg.grid.sizes = None;
    }
    if args.bc.is_some() {
        cfg.bc = args.bc;
    }
    if args.delta.is_some() {
        cfg.hv.delta = args.delta;
    }
    if args.cfl.is_some() {
        cfg.time.cfl = args.cfl;
    }
    if args.t_end.is_some() {
        cfg.time.t_end = args.t_end;
    }
    if args.suite.is_some() {
        cfg.suite = args.suite.clone();
    }
    if args.out.is_some() {
        cfg.output_dir = args.out.clone();
    }
    Ok(cfg)
}

fn out_dir(cfg: &RunConfig, experiment: Experiment) -> PathBuf {
    let env_root = std::env::var_os("SWE_OUT_DIR").map(PathBuf::from);
    output_dir(cfg.output_dir.as_deref(), env_root.as_deref(), experiment)
}

fn validate(args: &RunArgs) -> Result<serde_json::Value, Failure> {
    let cfg = load(args)?;
    let plan = resolve(&cfg).map_err(Failure::Config)?;
    Ok(json!({
        "status": "ok",
        "experiment": plan.experiment().name(),
        "output_dir": out_dir(&cfg, plan.experiment()),
        "resolved": plan,
    }))
}

fn run(args: &RunArgs) -> Result<serde_json::Value, Failure> {
    let cfg = load(args)?;
    let plan = resolve(&cfg).map_err(Failure::Config)?;
    let dir = out_dir(&cfg, plan.experiment());
    let meta = run::execute(&plan, &dir).map_err(|e| {
        let f = Failure::from_core(e);
        // leave the record next to the partial artifacts as well
        if dir.is_dir() {
            let _ = dpsbp::io::write_json(&dir.join("error.json"), &f.record());
        }
        f
    })?;
    Ok(json!({
        "status": "ok",
        "experiment": meta.experiment,
        "output_dir": dir,
        "files": meta.files,
        "summary": meta.summary,
    }))
}

fn list_experiments() -> serde_json::Value {
    let entries: Vec<_> = Experiment::ALL
        .iter()
        .map(|e| json!({ "name": e.name(), "description": e.description() }))
        .collect();
    json!(entries)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Validate(a) => validate(a),
        Command::ListExperiments => Ok(list_experiments()),
    };
    match result {
        Ok(v) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
