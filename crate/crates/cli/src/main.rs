//! `ldsp`: embedding-dimension importance analysis from the command line.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ldsp", version, about = "Find and evaluate the embedding dimensions that encode a linguistic property")]
struct Cli {
    /// Seed for train/test splits (and for `synth`, overrides the spec seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML or JSON file with `seed`, `[edi]` and `[eval]` settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (for `synth`, the output file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every dimension of each embedding set.
    Analyze(AnalyzeArgs),
    /// Check EDI rankings with held-out classifiers.
    Evaluate(EvaluateArgs),
    /// Predict the property of a pair from its difference vector.
    Classify(ClassifyArgs),
    /// Write a planted-signal embedding set.
    Synth(SynthArgs),
    /// Generate sentence pairs with a chat-completions endpoint.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// LDSE files or directories containing them.
    #[arg(long, required = true, num_args = 1..)]
    pub embeddings: Vec<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Dimensions kept by recursive feature elimination.
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long)]
    pub w1: Option<f64>,
    #[arg(long)]
    pub w2: Option<f64>,
    #[arg(long)]
    pub w3: Option<f64>,
    /// Fraction of surviving dimensions removed per elimination round.
    #[arg(long)]
    pub step_fraction: Option<f64>,
    /// Dimensions highlighted per signal in the combined-analysis chart.
    #[arg(long)]
    pub plot_top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub embeddings: Vec<PathBuf>,
    /// EDI report JSON files or directories containing `*.edi.json`.
    #[arg(long, required = true, num_args = 1..)]
    pub edi: Vec<PathBuf>,
    /// Fraction of baseline accuracy the high-EDI curve must reach.
    #[arg(long)]
    pub stop: Option<f64>,
    /// Lowest-ranked dimensions used by the low-EDI check.
    #[arg(long)]
    pub bottom: Option<usize>,
    /// Top dimensions of each other property used for cross-property checks.
    #[arg(long)]
    pub cross_k: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub embeddings: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON synthetic spec.
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub property: String,
    #[arg(long)]
    pub endpoint: String,
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 1000)]
    pub total: usize,
    #[arg(long, default_value_t = 100)]
    pub batch_size: usize,
    /// Environment variable holding the bearer token.
    #[arg(long, default_value = ldsp_core::generation::DEFAULT_API_KEY_ENV)]
    pub api_key_env: String,
    #[arg(long, default_value_t = 3)]
    pub max_attempts: usize,
    /// Delay before the first retry, doubled on each further retry.
    #[arg(long, default_value_t = 1000)]
    pub retry_delay_ms: u64,
}

pub struct Globals {
    pub seed: Option<u64>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let globals = Globals { seed: cli.seed, config: cli.config, out: cli.out };
    let work = move || match cli.command {
        Command::Analyze(a) => commands::analyze(&globals, &a),
        Command::Evaluate(a) => commands::evaluate(&globals, &a),
        Command::Classify(a) => commands::classify(&globals, &a),
        Command::Synth(a) => commands::synth(&globals, &a),
        Command::Gen(a) => commands::gen(&globals, &a),
    };
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
