//! Experiment driver for balanced urn simulations and their numerical
//! checks. Every subcommand writes deterministic JSON/CSV artifacts keyed
//! by a config hash and exits 0 only if all of its checks pass.

mod config;
mod report;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid --{field}: {message}")]
    Config {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] urnlab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    /// Kernel file (explicit row table or generator line).
    #[arg(long, value_name = "FILE", conflicts_with = "generator")]
    pub kernel: Option<PathBuf>,
    /// Generator rule: NAME key=val ...
    #[arg(long, value_name = "NAME [key=val ...]", num_args = 1..)]
    pub generator: Option<Vec<String>>,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Master seed; every replica stream is derived from it and the
    /// replica index, so results do not depend on scheduling.
    #[arg(long, default_value_t = 20_260_814)]
    pub seed: u64,
    /// Output directory for reports and series.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Parser)]
#[command(
    name = "urnlab",
    version,
    about = "Balanced-urn simulation and numerical verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run urn trajectories and compare them to the stationary law.
    UrnRun(runner::UrnRunArgs),
    /// Exact-law equality of the urn and the branching construction.
    CouplingCheck(runner::CouplingArgs),
    /// Covariance decay on fixed trees against a fitted certificate.
    CovarianceCheck(runner::CovarianceArgs),
    /// Growth-series identities, Monte Carlo, and boundedness checks.
    GrowthCheck(runner::GrowthArgs),
    /// Local-time variance against its growth envelope.
    VarianceCheck(runner::VarianceArgs),
    /// Reinforced star-graph walk: limit ratios and exact urn coupling.
    StarwalkRun(runner::StarwalkArgs),
    /// Stationary distribution, decay certificate, and minorization.
    ErgodicityFit(runner::ErgodicityArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::UrnRun(a) => runner::urn_run(a),
        Command::CouplingCheck(a) => runner::coupling_check(a),
        Command::CovarianceCheck(a) => runner::covariance_check(a),
        Command::GrowthCheck(a) => runner::growth_check(a),
        Command::VarianceCheck(a) => runner::variance_check(a),
        Command::StarwalkRun(a) => runner::starwalk_run(a),
        Command::ErgodicityFit(a) => runner::ergodicity_fit(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
