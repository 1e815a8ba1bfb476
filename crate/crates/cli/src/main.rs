mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use folia::verify::Level;

use config::Precision;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
/// Build: a stage condition could not be met. Verify: a check failed.
pub const EXIT_INVARIANT: u8 = 2;
pub const EXIT_VIOLATED: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_PARSE: u8 = 5;
pub const EXIT_USAGE: u8 = 64;

const EXIT_CODES: &str = "Exit codes:
  0   success (test: verdict consistent)
  1   I/O or other runtime error
  2   build: a stage condition (a)-(d) could not be met; verify: a check failed
  3   test: verdict violated
  4   test: verdict inconclusive
  5   test: the function does not parse or uses a variable beyond z_n
  64  usage error

FOLIA_THREADS caps the number of worker threads.";

#[derive(Parser, Debug)]
#[command(name = "folia", version, about = "Foliations by curves with angular points, and a holomorphy tester", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a foliation manifest.
    Build(BuildArgs),
    /// Export sampled leaves as CSV polylines.
    Leaves(LeavesArgs),
    /// Test a function for holomorphy along the leaves.
    Test(TestArgs),
    /// Re-check the invariants of a manifest.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// JSON build config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of stages K.
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Complex dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Domain kind: polydisc, ball or box.
    #[arg(long, value_parser = parse_kind)]
    pub domain: Option<folia::DomainKind>,
    /// Set every radius (half-extent for a box).
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
    #[arg(long)]
    pub resolution_target: Option<f64>,
    #[arg(long)]
    pub flow_steps: Option<usize>,
    #[arg(long)]
    pub k_bend: Option<f64>,
    /// Do not print the stage table.
    #[arg(long)]
    pub quiet: bool,
}

fn parse_kind(s: &str) -> Result<folia::DomainKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown domain kind `{s}` (polydisc, ball, box)"))
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).multiple(true).args(["anchors", "grid", "marked"]))]
pub struct LeavesArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// CSV of anchor points, one per row with 2n real coordinates.
    #[arg(long)]
    pub anchors: Option<PathBuf>,
    /// Number of anchors on a lattice across the leaves.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Also export every marked leaf.
    #[arg(long)]
    pub marked: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Uniform samples per leaf, before refinement near supports.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Expression in z1..zn, e.g. "exp(z1) + conj(z2)".
    #[arg(long)]
    pub function: Option<String>,
    /// JSON test config with keys "function", "oracle", "thresholds".
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Cross-check every residual with automatic differentiation.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub tau_detect: Option<f64>,
    /// Finite-difference step as a fraction of the bend radius.
    #[arg(long)]
    pub h0_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value = "quick")]
    pub level: LevelArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the check results as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        }
    }
}

/// A failed command: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<folia::Error> for Failure {
    fn from(e: folia::Error) -> Self {
        Failure::new(EXIT_ERROR, e.to_string())
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("FOLIA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::new(EXIT_USAGE, format!("FOLIA_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::new(EXIT_ERROR, e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = || -> Result<u8, Failure> {
        init_threads()?;
        match cli.command {
            Command::Build(a) => commands::build(a),
            Command::Leaves(a) => commands::leaves(a),
            Command::Test(a) => commands::test(a),
            Command::Verify(a) => commands::verify(a),
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
