mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Base-pairing probability dot-plots and paired-RNA datasets.
#[derive(Debug, Parser)]
#[command(name = "dotstitch", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Flat TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; relative paths in flags and config resolve against it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Global seed, the single source of randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for folding and image writes (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Minimum unpaired residues enclosed by a pair.
    #[arg(long, global = true)]
    theta: Option<usize>,

    /// Pair weights for GC/CG, AU/UA and GU/UG.
    #[arg(long, global = true)]
    w_gc: Option<f64>,

    #[arg(long, global = true)]
    w_au: Option<f64>,

    #[arg(long, global = true)]
    w_gu: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download family FASTA files from the archive endpoint.
    Fetch(commands::FetchArgs),
    /// Fold every sequence: BPPM TSV plus resized dot-plot PNG.
    Bppm(commands::BppmArgs),
    /// Build the pair images and both manifests.
    Build(commands::BuildArgs),
    /// Write a ratio-controlled training batch plan.
    Plan(commands::PlanArgs),
    /// Score a predictions file against a manifest.
    Eval(commands::EvalArgs),
    /// Enumerate the structure ensemble and compare with the DP.
    Oracle(commands::OracleArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.global, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
