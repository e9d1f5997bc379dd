//! Command-line front end for the leverage model.
//!
//! `run` parses arguments and a config file, validates everything before
//! touching the output directory, runs one experiment and writes CSV files
//! plus `manifest.json`. Exit codes: 0 success, 1 bad arguments, config or
//! spec (nothing written), 2 numerical failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use leverage_core::dynamics::RNG_ID;
use leverage_core::{
    emit_re_curve, find_re_equilibria, simulate, solve_equilibrium, sweep, validate_spec, Economy,
    EconomySpec, ModelError, ShockProbSpec,
};

pub use config::{ConfigErrors, ExperimentKind, RunConfig};
use output::WriteError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "leverage",
    version,
    about = "Credit market with heterogeneous beliefs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one within-period equilibrium for the initial distribution.
    Equilibrium(CommonArgs),
    /// Simulate the wealth dynamics for `run.periods` periods.
    Simulate(CommonArgs),
    /// Simulate every (gamma, pi_star) pair with a constant shock probability.
    Sweep(CommonArgs),
    /// Tabulate single-belief borrowing and find self-fulfilling beliefs.
    Recurve(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (`section.key = value` lines).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides `run.periods`.
    #[arg(long, value_name = "N")]
    pub periods: Option<usize>,
    /// Worker threads for `sweep` (default: all available cores).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] ModelError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) | Self::Write(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// One written file and its checksum.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Loads the config named by `args`, applies flag overrides and checks
/// everything that can be checked without running the model.
pub fn load_config(kind: ExperimentKind, args: &CommonArgs) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        CliError::Invalid(vec![format!(
            "cannot read config {}: {e}",
            args.config.display()
        )])
    })?;
    let mut cfg = RunConfig::parse(&text).map_err(|e| CliError::Invalid(e.0))?;
    cfg.kind = kind;
    if let Some(seed) = args.seed {
        cfg.simulation.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(periods) = args.periods {
        cfg.simulation.periods = periods;
    }
    if args.jobs.is_some() {
        cfg.jobs = args.jobs;
    }

    let mut problems = cfg.check();
    let describe = |label: &str, spec: &EconomySpec, problems: &mut Vec<String>| {
        for c in validate_spec(spec).violations() {
            problems.push(format!("{label}{}: {}", c.name, c.detail));
        }
    };
    describe("", &cfg.economy, &mut problems);
    if kind == ExperimentKind::Sweep {
        for &gamma in &cfg.sweep_gammas {
            for &pi in &cfg.sweep_pis {
                let spec = EconomySpec {
                    gamma,
                    shock_prob: ShockProbSpec::Constant(pi),
                    ..cfg.economy.clone()
                };
                describe(
                    &format!("sweep cell gamma={gamma} pi_star={pi}: "),
                    &spec,
                    &mut problems,
                );
            }
        }
    }
    if let Err(e) = cfg.simulation.initial.resolve(&cfg.economy.grid) {
        problems.push(format!("initial distribution: {e}"));
    }
    if problems.is_empty() {
        Ok(cfg)
    } else {
        problems.dedup();
        Err(CliError::Invalid(problems))
    }
}

/// Computed files, kept in memory until every computation has succeeded.
fn compute(cfg: &RunConfig) -> Result<Vec<(String, String)>, CliError> {
    let economy =
        Economy::new(cfg.economy.clone()).map_err(|e| CliError::Invalid(vec![e.to_string()]))?;
    let thetas = economy.grid().thetas();
    let mut files = Vec::new();
    match cfg.kind {
        ExperimentKind::Equilibrium => {
            let f = cfg.simulation.initial.resolve(economy.grid())?;
            let eq = solve_equilibrium(&f, &economy)?;
            files.push((
                "equilibrium.csv".into(),
                output::equilibrium_csv(&eq, &economy),
            ));
            files.push(("shares.csv".into(), output::shares_csv(&eq, &f, thetas)));
        }
        ExperimentKind::Simulate => {
            let run = simulate(&economy, &cfg.simulation)?;
            files.push(("timeseries.csv".into(), output::timeseries_csv(&run)));
            files.push((
                "distribution.csv".into(),
                output::distribution_csv(&run, thetas),
            ));
        }
        ExperimentKind::Sweep => {
            let table = sweep(
                &cfg.economy,
                &cfg.sweep_gammas,
                &cfg.sweep_pis,
                &cfg.simulation,
                cfg.summary,
                cfg.jobs,
            )?;
            for (g, _) in table.gammas.iter().enumerate() {
                for (p, _) in table.pis.iter().enumerate() {
                    let cell = table.cell(g, p);
                    files.push((
                        format!("cells/gamma{g}_pi{p}_timeseries.csv"),
                        output::timeseries_csv(&cell.run),
                    ));
                }
            }
            files.push(("sweep.csv".into(), output::sweep_csv(&table)));
        }
        ExperimentKind::Recurve => {
            let curve = emit_re_curve(&economy, cfg.recurve_points)?;
            let roots = find_re_equilibria(&economy, cfg.recurve_scan)?;
            files.push(("recurve.csv".into(), output::recurve_csv(&curve)));
            files.push(("fixed_points.csv".into(), output::fixed_points_csv(&roots)));
        }
    }
    Ok(files)
}

fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<OutputFile>, WriteError> {
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| WriteError {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        let sha256 = output::write_checked(&path, contents)?;
        written.push(OutputFile {
            name: name.clone(),
            sha256,
            bytes: contents.len(),
        });
    }
    Ok(written)
}

fn manifest_json(
    cfg: &RunConfig,
    outputs: &[OutputFile],
    started: SystemTime,
    elapsed: f64,
) -> String {
    let config: serde_json::Map<String, serde_json::Value> = cfg
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
        .collect();
    let started_unix = started
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let manifest = serde_json::json!({
        "tool": "leverage",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.kind.as_str(),
        "seed": cfg.simulation.seed,
        "rng": RNG_ID,
        "config": config,
        "config_text": cfg.serialize(),
        "started_unix": started_unix,
        "wall_clock_seconds": elapsed,
        "outputs": outputs.iter().map(|o| serde_json::json!({
            "file": o.name,
            "sha256": o.sha256,
            "bytes": o.bytes,
        })).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest is valid JSON");
    text.push('\n');
    text
}

/// Runs one experiment and returns the files written, manifest excluded.
pub fn execute(
    kind: ExperimentKind,
    args: &CommonArgs,
) -> Result<(RunConfig, Vec<OutputFile>), CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let cfg = load_config(kind, args)?;
    let files = compute(&cfg)?;
    let outputs = write_all(&cfg.out_dir, &files)?;
    let manifest = manifest_json(&cfg, &outputs, started, clock.elapsed().as_secs_f64());
    output::write_checked(&cfg.out_dir.join("manifest.json"), &manifest)?;
    Ok((cfg, outputs))
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (kind, common) = match &cli.command {
        Command::Equilibrium(a) => (ExperimentKind::Equilibrium, a),
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::Recurve(a) => (ExperimentKind::Recurve, a),
    };
    match execute(kind, common) {
        Ok((cfg, outputs)) => {
            for o in &outputs {
                println!("{}  {}", o.sha256, cfg.out_dir.join(&o.name).display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
