//! `simdeg`: command-line detection of low-quality synchrophasor data.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error.

mod canonical;
mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use simdeg_core::AnomalyKind;

/// CLI failure classified for the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration: exit code 1.
    Usage(String),
    /// Unreadable or inconsistent data: exit code 2.
    Data(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// JSON report plus flag-mask and plot CSVs.
    All,
    /// JSON report only.
    Json,
    /// Flag-mask and plot CSVs only.
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Spike,
    Repeated,
    Fdi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Bias,
    Ramp,
}

#[derive(Parser)]
#[command(
    name = "simdeg",
    version,
    about = "Similarity-degree detection of low-quality synchrophasor (PMU) data",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    detector_flags: settings::DetectorFlags,

    /// Output directory for reports and datasets.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out: PathBuf,

    /// Seed for data generation and anomaly drawing.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Which detect outputs to write.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::All)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Detect low-quality data in a CSV dataset.
    Detect {
        /// Input dataset (`time,<ch1>,<ch2>,...`).
        input: PathBuf,
    },
    /// Generate a labeled synthetic multi-channel dataset.
    Simulate {
        /// Number of channels.
        #[arg(long, default_value_t = 20)]
        channels: usize,
        /// Duration in seconds.
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        /// Superimpose a shared frequency-event excursion.
        #[arg(long)]
        event: bool,
    },
    /// Inject an anomaly into an existing dataset.
    Inject {
        /// Input dataset.
        input: PathBuf,
        /// Anomaly type.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Target channel indices, comma separated (0-based).
        #[arg(long, value_name = "I,J,...")]
        channels: String,
        /// First sample of the injection interval.
        #[arg(long)]
        start: usize,
        /// Interval length in samples.
        #[arg(long)]
        length: usize,
        /// Number of spikes placed inside the interval (spike kind only).
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Magnitude: `unobvious`, `fixed:<v>` or `sigma:<lo>,<hi>`.
        #[arg(long, default_value = "unobvious")]
        magnitude: String,
        /// False-data segment shape (fdi kind only).
        #[arg(long, value_enum, default_value_t = ShapeArg::Bias)]
        shape: ShapeArg,
    },
    /// Measure detector throughput on synthetic data.
    Bench {
        #[arg(long, default_value_t = 22)]
        channels: usize,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
    },
    /// Monte-Carlo comparison of the proposed detector and the LOF
    /// baseline on injected false data.
    Compare {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        channels: usize,
        /// Number of channels receiving the same-interval injection.
        #[arg(long, default_value_t = 4)]
        targets: usize,
        #[arg(long, default_value_t = 30.0)]
        duration: f64,
        /// Injection length in samples.
        #[arg(long, default_value_t = 10)]
        fdi_length: usize,
        /// Injection start sample (default: two thirds in).
        #[arg(long)]
        start: Option<usize>,
        /// Magnitude: `unobvious`, `fixed:<v>` or `sigma:<lo>,<hi>`.
        #[arg(long, default_value = "unobvious")]
        magnitude: String,
        /// Generate normal-condition data instead of an event.
        #[arg(long)]
        no_event: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let eff = settings::resolve(&cli.detector_flags)?;
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Detect { input } => commands::cmd_detect(&input, &cli.out, cli.format, &eff),
        Command::Simulate {
            channels,
            duration,
            event,
        } => commands::cmd_simulate(
            &cli.out,
            channels,
            duration,
            eff.detector.sample_rate_hz,
            event,
            seed,
            &eff,
        ),
        Command::Inject {
            input,
            kind,
            channels,
            start,
            length,
            count,
            magnitude,
            shape,
        } => {
            let kind = match kind {
                KindArg::Spike => AnomalyKind::Spike { count },
                KindArg::Repeated => AnomalyKind::Repeated,
                KindArg::Fdi => AnomalyKind::Fdi {
                    shape: match shape {
                        ShapeArg::Bias => simdeg_core::FdiShape::Bias,
                        ShapeArg::Ramp => simdeg_core::FdiShape::Ramp,
                    },
                },
            };
            let args = commands::InjectArgs {
                kind,
                channels: settings::parse_channel_list(&channels)?,
                start,
                length,
                magnitude: commands::parse_magnitude(&magnitude)?,
                seed,
            };
            commands::cmd_inject(&input, &cli.out, args, &eff)
        }
        Command::Bench { channels, duration } => {
            commands::cmd_bench(&cli.out, channels, duration, seed, &eff)
        }
        Command::Compare {
            trials,
            channels,
            targets,
            duration,
            fdi_length,
            start,
            magnitude,
            no_event,
        } => commands::cmd_compare(
            &cli.out,
            trials,
            channels,
            targets,
            duration,
            fdi_length,
            start,
            commands::parse_magnitude(&magnitude)?,
            !no_event,
            seed,
            &eff,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
