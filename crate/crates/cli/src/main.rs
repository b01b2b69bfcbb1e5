//! `gazepinch`: generate, replay and evaluate traces, or serve live sessions.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 data error.

mod commands;
mod config;
mod serve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gazepinch::transfer::TransferMode;

use crate::config::{CliConfig, Overrides};

#[derive(Parser, Debug)]
#[command(name = "gazepinch", version, about = "Gaze + pinch input fusion: simulate, replay, evaluate, serve")]
struct Cli {
    /// JSON config file with optional "fusion", "generate" and "scene" sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(flatten)]
    overrides: OverrideArgs,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default)]
struct OverrideArgs {
    /// Generator seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Generator gaze noise, degrees (standard deviation per axis).
    #[arg(long, global = true)]
    noise: Option<f64>,
    #[arg(long, global = true)]
    buffer_fraction: Option<f64>,
    #[arg(long, global = true, value_enum)]
    transfer_mode: Option<ModeArg>,
    #[arg(long, global = true)]
    late_window_ms: Option<u64>,
    #[arg(long, global = true)]
    early_window_ms: Option<u64>,
    #[arg(long, global = true)]
    grace_period_ms: Option<u64>,
    #[arg(long, global = true)]
    dispersion_threshold_deg: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    VisualAngle,
    DistanceGain,
    Unity,
}

impl From<ModeArg> for TransferMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::VisualAngle => TransferMode::VisualAngle,
            ModeArg::DistanceGain => TransferMode::DistanceGain,
            ModeArg::Unity => TransferMode::Unity,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic trace and its ground-truth labels.
    Generate {
        #[arg(long)]
        scene: PathBuf,
        /// Output trace file.
        #[arg(long)]
        trace: PathBuf,
        /// Output labels file.
        #[arg(long)]
        labels: PathBuf,
    },
    /// Run a trace through the engine and write the event log.
    Replay {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Output event log; standard output when omitted.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Score an event log against labels.
    Evaluate {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Serve the WebSocket session protocol at /session.
    Serve {
        #[arg(long)]
        scene: PathBuf,
        /// 0 picks a free port.
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(e) | Failure::Data(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let o = cli.overrides;
    let overrides = Overrides {
        seed: o.seed,
        noise: o.noise,
        buffer_fraction: o.buffer_fraction,
        transfer_mode: o.transfer_mode.map(Into::into),
        late_window_ms: o.late_window_ms,
        early_window_ms: o.early_window_ms,
        grace_period_ms: o.grace_period_ms,
        dispersion_threshold_deg: o.dispersion_threshold_deg,
    };
    let config = CliConfig::load(cli.config.as_deref(), &overrides)?;
    if cli.print_config {
        println!("{}", config.to_pretty_json());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Failure::Usage(anyhow::anyhow!(
            "no command given (expected generate, replay, evaluate or serve)"
        )));
    };
    match command {
        Command::Generate { scene, trace, labels } => commands::generate(&config, &scene, &trace, &labels),
        Command::Replay { scene, trace, events } => commands::replay(&config, &scene, &trace, events.as_deref()),
        Command::Evaluate { events, labels } => commands::evaluate(&events, &labels),
        Command::Serve { scene, port, host } => serve::serve(&config, &scene, &host, port),
    }
}
