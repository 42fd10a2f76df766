use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use risae::commands;
use risae::parallel::default_workers;
use risae::{ExperimentConfig, Result};

/// Autoencoder links through a reconfigurable intelligent surface.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Monte Carlo worker threads (results do not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print the effective config as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the RIS codebook to codebook.csv.
    Codebook,
    /// Train the networks; writes model.ckpt and loss.csv.
    Train,
    /// Evaluate model.ckpt over the SNR grid; writes ser.csv.
    Sweep,
    /// QPSK over AWGN, analytic and Monte Carlo; writes baseline.csv.
    Baseline,
    /// Gain table from an SER table; writes gains.csv.
    Gains {
        /// SER table to read (default <out>/ser.csv).
        #[arg(long)]
        ser: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.print_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let workers = cli.workers.unwrap_or_else(default_workers).max(1);
    let out = &cli.out;
    match cli.command {
        None => {
            eprintln!("no command given; see --help");
        }
        Some(Command::Codebook) => println!("{}", commands::cmd_codebook(&cfg, out)?.display()),
        Some(Command::Train) => {
            commands::cmd_train(&cfg, out)?;
            println!("{}", out.join(commands::CHECKPOINT_FILE).display());
            println!("{}", out.join(commands::LOSS_FILE).display());
        }
        Some(Command::Sweep) => println!("{}", commands::cmd_sweep(&cfg, out, workers)?.display()),
        Some(Command::Baseline) => println!("{}", commands::cmd_baseline(&cfg, out, workers)?.display()),
        Some(Command::Gains { ser }) => println!("{}", commands::cmd_gains(&cfg, ser.as_deref(), out)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
