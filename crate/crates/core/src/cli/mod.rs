//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error (including bad flags),
//! 2 runtime failure such as a classifier crash. `serve` exits 3 when told
//! to simulate a crash.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{parse_sweep, plan_id};

#[derive(Debug, Parser)]
#[command(name = "paretoprobe", version, about = "Find decision borders of black-box classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one strategy once and write the pairs it finds.
    Explore(ExploreArgs),
    /// Sweep walk counts over repetitions and write CSV reports.
    Experiment(ExperimentArgs),
    /// Print a traversal/midpoint composition from one point to another.
    PlanPath(PlanPathArgs),
    /// Serve a built-in classifier over the line protocol on stdin/stdout.
    Serve(ServeArgs),
    /// Estimate the share of the domain each label covers.
    ClassMass(ClassMassArgs),
}

/// Where labels come from: a built-in subject or a bridged process.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Built-in subject, e.g. `sin2`.
    #[arg(long, conflicts_with = "bridge", required_unless_present = "bridge")]
    pub subject: Option<String>,
    /// Subject parameter override, `name=value`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Command line of a classifier process speaking the line protocol.
    #[arg(long, requires = "schema")]
    pub bridge: Option<String>,
    /// Input space schema (JSON). Required with --bridge.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Restart a crashed bridge process up to this many times.
    #[arg(long, default_value_t = 0)]
    pub restarts: u32,
    #[arg(long, default_value_t = 5_000)]
    pub handshake_timeout_ms: u64,
    #[arg(long, default_value_t = 10_000)]
    pub request_timeout_ms: u64,
    /// Log every bridge protocol line to this file.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Refinement iterations per bracket.
    #[arg(long, default_value_t = 20)]
    pub steps: u32,
    /// Traversal steps per walk.
    #[arg(long, default_value_t = 20)]
    pub walk_distance: u32,
    /// Number of random seed points.
    #[arg(long, default_value_t = 300)]
    pub pool_size: usize,
    /// Traversals, e.g. `U0` or `U0,D0,U1`. Directed walks use the first;
    /// random walks default to every traversal.
    #[arg(long, value_delimiter = ',')]
    pub traversal: Vec<String>,
    #[arg(long, env = "PARETO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Upper bound on walk threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "paretoprobe-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// random-target, directed-walk or random-walk.
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = 1000)]
    pub walks: u64,
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Seed points, one JSON array per line, instead of random sampling.
    #[arg(long)]
    pub pool: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// `--subject all` runs every built-in subject.
    #[command(flatten)]
    pub source: SourceArgs,
    /// Strategy name or `all`.
    #[arg(long)]
    pub strategy: String,
    /// Walk counts: `start:stop:step`, a comma list, or a single count.
    #[arg(long, default_value = "1000")]
    pub sweep: String,
    #[arg(long, default_value_t = 10)]
    pub repetitions: u32,
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Also draw an SVG of the pairs for two-dimensional schemas.
    #[arg(long)]
    pub render: bool,
    /// Report name for a bridged classifier.
    #[arg(long, default_value = "bridge")]
    pub name: String,
}

#[derive(Debug, Clone, Args)]
pub struct PlanPathArgs {
    #[arg(long, conflicts_with = "subject_space", required_unless_present = "subject_space")]
    pub schema: Option<PathBuf>,
    /// Use the built-in subjects' input space.
    #[arg(long)]
    pub subject_space: bool,
    /// Start point as a JSON array.
    #[arg(long)]
    pub from: String,
    /// End point as a JSON array.
    #[arg(long)]
    pub to: String,
    /// Distance tolerance for the endpoint.
    #[arg(long, default_value_t = 1e-6, allow_negative_numbers = true)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, conflicts_with = "constant", required_unless_present = "constant")]
    pub subject: Option<String>,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Label every point with this label. Needs --schema.
    #[arg(long, requires = "schema")]
    pub constant: Option<String>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Answer requests concurrently and say so in the handshake.
    #[arg(long)]
    pub concurrent: bool,
    #[arg(long, hide = true)]
    pub crash_after: Option<u64>,
    #[arg(long, hide = true, default_value_t = 0)]
    pub delay_ms: u64,
    #[arg(long, hide = true)]
    pub declare_features: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassMassArgs {
    #[arg(long)]
    pub subject: String,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, env = "PARETO_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Explore(a) => commands::explore(&a),
        Command::Experiment(a) => commands::experiment(&a),
        Command::PlanPath(a) => commands::plan_path(&a),
        Command::Serve(a) => commands::serve(&a),
        Command::ClassMass(a) => commands::class_mass(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
