//! Batch runner behind the `opsis` binary.
//!
//! Exit codes: 0 success, 2 the system is not a Riesz sequence or the
//! samples do not form a frame, 3 invalid configuration, 4 non-finite values,
//! 1 I/O failure.

pub mod commands;
pub mod config;
pub mod report;

use std::path::Path;
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

pub use commands::Outcome;
pub use config::ExperimentConfig;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Not a Riesz sequence or not a frame.
    #[error("{0}")]
    Math(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) => 3,
            CliError::Math(_) => 2,
            CliError::NonFinite(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::InvalidConfig(_) => "InvalidConfig",
            CliError::Math(_) => "Math",
            CliError::NonFinite(_) => "NonFinite",
            CliError::Io(_) => "Io",
        }
    }
}

impl From<opsis_core::Error> for CliError {
    fn from(e: opsis_core::Error) -> Self {
        match e {
            opsis_core::Error::NotRiesz { .. } | opsis_core::Error::NotAFrame { .. } => CliError::Math(e.to_string()),
            other => CliError::InvalidConfig(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RieszCheck,
    FrameCheck,
    Reconstruct,
    ChannelDemo,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RieszCheck => "riesz-check",
            Command::FrameCheck => "frame-check",
            Command::Reconstruct => "reconstruct",
            Command::ChannelDemo => "channel-demo",
            Command::Sweep => "sweep",
        }
    }
}

/// Runs a pipeline in memory.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::RieszCheck => commands::run_riesz_check(cfg),
        Command::FrameCheck => commands::run_frame_check(cfg),
        Command::Reconstruct => commands::run_reconstruct(cfg),
        Command::ChannelDemo => commands::run_channel_demo(cfg),
        Command::Sweep => commands::run_sweep(cfg),
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunOptions<'a> {
    pub config: &'a Path,
    pub out: &'a Path,
    pub seed: Option<u64>,
    pub timing: bool,
}

/// Loads the configuration, runs the pipeline, writes `metrics.json` and the
/// CSV tables into the output directory and returns the exit code. Failures
/// are written to `metrics.json` as a structured `error` object.
pub fn execute(cmd: Command, opts: &RunOptions) -> i32 {
    let start = Instant::now();
    let result = ExperimentConfig::from_path(opts.config).and_then(|mut cfg| {
        if let Some(seed) = opts.seed {
            cfg.seed = seed;
        }
        run(cmd, &cfg)
    });
    let (code, mut metrics, tables) = match result {
        Ok(o) => (o.code, o.metrics, o.tables),
        Err(e) => {
            eprintln!("opsis {}: {e}", cmd.name());
            let metrics = json!({
                "command": cmd.name(),
                "error": {"kind": e.kind(), "message": e.to_string()},
            });
            (e.exit_code(), metrics, Vec::new())
        }
    };
    if let Some(d) = metrics.get("diagnostic").and_then(|d| d.as_str()) {
        eprintln!("opsis {}: {d}", cmd.name());
    }
    metrics["exit_code"] = json!(code);
    if opts.timing {
        metrics["timing"] = json!({"seconds": start.elapsed().as_secs_f64()});
    }
    match report::write_outputs(opts.out, &metrics, &tables) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("opsis {}: {e}", cmd.name());
            e.exit_code()
        }
    }
}
