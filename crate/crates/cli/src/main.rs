//! `emwave`: simulate bus-frequency responses, decompose them with a 4-tap
//! Daubechies wavelet and report disturbance origin, coherent groups and
//! rate of change of frequency.
//!
//! Exit status is 0 on success, 1 on invalid input or configuration and 2
//! on numerical failure.

mod config;
mod output;
mod pipeline;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use emwave::analysis::{Window, DEFAULT_THETA_IN, DEFAULT_THETA_OUT, DEFAULT_THRESHOLD};
use emwave::wavelet::{Extension, DEFAULT_LEVELS};

use config::{parse_window, PipelineConfig, Stage};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("exactly one input source is required: pass --scenario or --signals")]
    InputSource,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Parser)]
#[command(name = "emwave", version, about = "Wavelet analysis of power system frequency dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write 10 Hz bus frequency deviations to signals.csv
    Simulate(Args),
    /// Write per-channel D1..DL and AL components
    Decompose(Args),
    /// Run the full pipeline: components, energies, coherency and rocof
    Analyze(Args),
    /// D1 energy ranking and arrival order (energies.csv)
    Localize(Args),
    /// Coherent groups from the deepest detail (coherency.csv)
    Coherency(Args),
    /// Final-approximation slopes (rocof.csv)
    Rocof(Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtensionArg {
    Symmetric,
    Periodic,
    Zero,
}

impl From<ExtensionArg> for Extension {
    fn from(e: ExtensionArg) -> Self {
        match e {
            ExtensionArg::Symmetric => Extension::Symmetric,
            ExtensionArg::Periodic => Extension::Periodic,
            ExtensionArg::Zero => Extension::Zero,
        }
    }
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML)
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Signals CSV with a leading `time` column
    #[arg(long)]
    signals: Option<PathBuf>,
    /// Decomposition depth
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = ExtensionArg::Symmetric)]
    extension: ExtensionArg,
    /// D1 energy window; T0 also anchors the default coherency and fit windows
    #[arg(long, value_name = "T0,T1", value_parser = parse_window)]
    event_window: Option<Window>,
    /// Coherency window [default: event +2 s to event +40 s]
    #[arg(long, value_name = "T0,T1", value_parser = parse_window)]
    coherency_window: Option<Window>,
    /// Slope fit window [default: event +3 s to event +9 s]
    #[arg(long, value_name = "T0,T1", value_parser = parse_window)]
    fit_window: Option<Window>,
    /// |D1| detection threshold in Hz
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = DEFAULT_THETA_IN)]
    theta_in: f64,
    #[arg(long, default_value_t = DEFAULT_THETA_OUT)]
    theta_out: f64,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "emwave-out")]
    out: PathBuf,
}

fn build_config(command: Command) -> Result<PipelineConfig, ConfigError> {
    let (stage, args) = match command {
        Command::Simulate(a) => (Stage::Simulate, a),
        Command::Decompose(a) => (Stage::Decompose, a),
        Command::Analyze(a) => (Stage::Analyze, a),
        Command::Localize(a) => (Stage::Localize, a),
        Command::Coherency(a) => (Stage::Coherency, a),
        Command::Rocof(a) => (Stage::Rocof, a),
    };
    let input = PipelineConfig::input_from(args.scenario, args.signals)?;
    let mut cfg = PipelineConfig::new(stage, input, args.out);
    cfg.levels = args.levels;
    cfg.extension = args.extension.into();
    cfg.event_window = args.event_window;
    cfg.coherency_window = args.coherency_window;
    cfg.fit_window = args.fit_window;
    cfg.threshold = args.threshold;
    cfg.theta_in = args.theta_in;
    cfg.theta_out = args.theta_out;
    Ok(cfg)
}

fn run(command: Command) -> anyhow::Result<String> {
    let cfg = build_config(command)?;
    let outputs = pipeline::run_pipeline(&cfg)?;
    output::write_outputs(&cfg.out_dir, &outputs)?;
    Ok(outputs.summary().to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<emwave::Error>())
        .any(emwave::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
