use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use opsis_cli::{execute, Command, RunOptions};

/// Sampling and reconstruction experiments for lattice shift-invariant
/// operator spaces on Z_L x Z_L.
#[derive(Parser)]
#[command(name = "opsis", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Riesz bounds of the lattice translates of the generators.
    RieszCheck(Common),
    /// Frame bounds of the transfer matrix.
    FrameCheck(Common),
    /// Synthesize, sample and reconstruct a seeded operator.
    Reconstruct(Common),
    /// Dump the channel matrix and compare its diagonal with the samples.
    ChannelDemo(Common),
    /// Run the reconstruction pipeline over a grid of separable lattices.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for metrics.json and CSV tables.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Adds wall-clock timing to metrics.json.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let (cmd, args) = match cli.command {
        Cmd::RieszCheck(a) => (Command::RieszCheck, a),
        Cmd::FrameCheck(a) => (Command::FrameCheck, a),
        Cmd::Reconstruct(a) => (Command::Reconstruct, a),
        Cmd::ChannelDemo(a) => (Command::ChannelDemo, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let code = execute(
        cmd,
        &RunOptions {
            config: &args.config,
            out: &args.out,
            seed: args.seed,
            timing: args.timing,
        },
    );
    ExitCode::from(code as u8)
}
