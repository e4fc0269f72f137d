//! `radiomap`: batch front end for anchor maps, generation orders, entropy
//! analysis, metrics and synthetic scenes.
//!
//! Every option can also come from a `key = value` config file (`--config` or
//! `RADIOMAP_CONFIG`); flags win over the file, the file over built-in defaults.

mod commands;
mod config;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{KeyValues, CONFIG_ENV};

#[derive(Parser, Debug)]
#[command(name = "radiomap", version, about = "Physics-guided radio-map sequencing toolkit")]
struct Cli {
    /// Run configuration (flat key = value file).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Anchor maps for one or more scenes.
    Anchor(commands::anchor::AnchorArgs),
    /// Generation orders, cost dumps and containment reports.
    Order(commands::order::OrderArgs),
    /// Entropy profiles and per-patch ΔH maps from logit traces.
    Entropy(commands::entropy::EntropyArgs),
    /// NMSE, RMSE, SSIM, PSNR and gradient gaps between two fields.
    Metrics(commands::metrics::MetricsArgs),
    /// Synthetic cities and pseudo ground-truth fields.
    Synth(commands::synth::SynthArgs),
    /// Built-in oracle suites.
    Selftest(commands::selftest::SelftestArgs),
}

/// Values shared by every subcommand after config resolution.
pub struct Context {
    pub cfg: KeyValues,
    pub seed: u64,
    pub jobs: usize,
}

/// Outcome of a subcommand that ran to completion.
pub enum Status {
    Ok,
    /// A requested verification did not hold.
    VerificationFailed,
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let cfg = KeyValues::load_run_config(cli.config.as_deref())?;
    let ctx = Context { seed: cfg.pick(cli.seed, "seed", 0)?, jobs: cfg.pick(cli.jobs, "jobs", 1)?, cfg };
    match cli.command {
        Command::Anchor(a) => commands::anchor::run(&ctx, a),
        Command::Order(a) => commands::order::run(&ctx, a),
        Command::Entropy(a) => commands::entropy::run(&ctx, a),
        Command::Metrics(a) => commands::metrics::run(&ctx, a),
        Command::Synth(a) => commands::synth::run(&ctx, a),
        Command::Selftest(a) => commands::selftest::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
