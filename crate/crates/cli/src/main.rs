use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bpd_cli::commands;
use bpd_cli::load_config;

/// Behavioral-predisposition conditioned activity recognition for wrist
/// accelerometer recordings.
#[derive(Parser)]
#[command(name = "bpd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to a key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads, 0 = all cores (overrides the config).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic recordings with ground-truth regimes.
    Synth,
    /// Export the per-window feature matrix as CSV.
    Featurize,
    /// Build and export the BPD model of each subject.
    Cluster,
    /// Run the factorial experiment grid.
    Experiment,
    /// Render results into SVG charts and text tables.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref(), cli.out, cli.seed, cli.jobs) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Synth => commands::cmd_synth(&config),
        Command::Featurize => commands::cmd_featurize(&config),
        Command::Cluster => commands::cmd_cluster(&config),
        Command::Experiment => commands::cmd_experiment(&config),
        Command::Report => commands::cmd_report(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
