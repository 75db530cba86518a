//! Experiment driver for the homoflow library. Each subcommand resolves its
//! parameters (defaults, then an optional key=value config file, then
//! key=value arguments), runs one experiment, prints a key-value report, and
//! writes CSV artifacts plus a JSON manifest that `rerun` can replay
//! byte-identically.

mod cmds;
mod config;
mod manifest;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::Params;
use manifest::Manifest;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or inputs: exit code 2.
    Config(String),
    /// Library-level failure, mapped to exit 2, 3, or 4 by kind.
    Numerics(homoflow::Error),
    /// Filesystem trouble: exit code 1.
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Numerics(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<homoflow::Error> for CliError {
    fn from(e: homoflow::Error) -> Self {
        CliError::Numerics(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use homoflow::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Numerics(e) => match e {
                E::InvalidParameter(_)
                | E::StaticFlow
                | E::Unsupported(_)
                | E::GridTooCoarse(_)
                | E::Degenerate(_) => 2,
                E::NoConvergence(_) | E::QuadratureUnresolved(_) | E::WindowTooShort(_) => 3,
                E::ResourceCap(_) => 4,
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "homoflow",
    version,
    about = "Numerical experiments on collision-dominated-to-frozen homoenergetic gas flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every experiment subcommand.
#[derive(Args, Debug)]
struct RunArgs {
    /// key=value parameter file (later command line pairs override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV artifacts and the run manifest
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// key=value parameter overrides
    #[arg(value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the long-time template of the mean-flow matrix for an
    /// initial deformation A
    Classify(RunArgs),
    /// Integrate the closed shear moment system and compare the fitted
    /// leading growth with the cycle-graph prediction
    Moments(RunArgs),
    /// Enumerate growth cycles of a user-supplied affine coupling graph
    Wkb(RunArgs),
    /// Moment history equation with a prescribed collision rate
    ToyDet(RunArgs),
    /// Self-consistent collision rate experiment (rate determined by the
    /// solution itself)
    ToySc(RunArgs),
    /// Event-driven particle Monte Carlo of the toy interaction
    ToyMc(RunArgs),
    /// Roots of the Laplace-symbol dispersion relation
    Dispersion(RunArgs),
    /// Collision-rate decay along collisionless free flows
    Frozen(RunArgs),
    /// Entropy diagnostics of transported Maxwellian families
    Entropy(RunArgs),
    /// Emit a gnuplot script for existing CSV artifacts
    Plot {
        /// What to draw: moments, rate-convergence, front, rate-decay, or
        /// dispersion
        kind: String,
        /// Input CSV produced by the matching subcommand
        csv: PathBuf,
        /// Script path (defaults to <kind>.gp next to the CSV)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a run from its manifest
    Rerun {
        manifest: PathBuf,
        /// Output directory for the reproduced artifacts
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// HOMOFLOW_THREADS caps the rayon pool; unset means one worker per core.
/// Results never depend on it.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HOMOFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| CliError::Config(format!("HOMOFLOW_THREADS: not a thread count: {raw:?}")))?;
    if n == 0 {
        return Err(CliError::Config(
            "HOMOFLOW_THREADS must be at least 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool setup failed: {e}")))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify(a) => run_experiment("classify", a),
        Command::Moments(a) => run_experiment("moments", a),
        Command::Wkb(a) => run_experiment("wkb", a),
        Command::ToyDet(a) => run_experiment("toy-det", a),
        Command::ToySc(a) => run_experiment("toy-sc", a),
        Command::ToyMc(a) => run_experiment("toy-mc", a),
        Command::Dispersion(a) => run_experiment("dispersion", a),
        Command::Frozen(a) => run_experiment("frozen", a),
        Command::Entropy(a) => run_experiment("entropy", a),
        Command::Plot { kind, csv, out } => cmds::plot::emit_plot_script(&kind, &csv, out),
        Command::Rerun { manifest, out } => rerun(&manifest, &out),
    }
}

fn run_experiment(name: &str, args: RunArgs) -> Result<(), CliError> {
    let mut params = Params::from_defaults(cmds::defaults(name)?);
    if let Some(path) = &args.config {
        params.merge(&Params::load(path)?);
    }
    params.apply_pairs(&args.params)?;
    execute(name, params, &args.out)
}

fn rerun(manifest_path: &Path, out: &Path) -> Result<(), CliError> {
    let old = Manifest::load(manifest_path)?;
    let mut params = Params::default();
    let pairs: Vec<String> = old
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    params.apply_pairs(&pairs)?;
    execute(&old.subcommand, params, out)
}

/// Run a fully resolved experiment and record its manifest.
fn execute(name: &str, params: Params, out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)?;
    let started = Instant::now();
    let artifacts = cmds::run(name, &params, out)?;
    let manifest = Manifest {
        subcommand: name.to_string(),
        params: params.entries().clone(),
        seed: params.entries().get("seed").and_then(|s| s.parse().ok()),
        versions: Manifest::versions(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        artifacts,
        threads: std::env::var("HOMOFLOW_THREADS")
            .ok()
            .and_then(|s| s.parse().ok()),
    };
    manifest.write(out)
}
