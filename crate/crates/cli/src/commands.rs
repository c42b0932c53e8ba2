//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use simdeg_core::{
    generate, inject, monte_carlo_compare, run_stream, AnomalyKind, AnomalySpec, CompareConfig,
    CompareSummary, DetectionReport, DetectorConfig, Error, FdiShape, LabelMask, LofConfig,
    Magnitude, ScenarioSpec, SignalMatrix, WindowTrace,
};

use crate::canonical::to_canonical_json;
use crate::settings::Effective;
use crate::{CliError, OutputFormat};

pub fn map_core_err(err: Error) -> CliError {
    match err {
        Error::Csv(_)
        | Error::Io(_)
        | Error::NonFiniteSample { .. }
        | Error::RaggedChannels { .. }
        | Error::RaggedBatch
        | Error::ChannelCountMismatch { .. }
        | Error::SampleRateMismatch { .. }
        | Error::WindowOutOfRange { .. }
        | Error::TooFewChannels { .. }
        | Error::WindowTooShort { .. } => CliError::Data(err.to_string()),
        _ => CliError::Usage(err.to_string()),
    }
}

fn now_unix_s() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seed: Option<u64>,
    detector: DetectorConfig,
    lof: Option<LofConfig>,
    started_unix_s: u64,
    finished_unix_s: u64,
}

struct ManifestBuilder {
    manifest: RunManifest,
}

impl ManifestBuilder {
    fn new(command: &str, detector: DetectorConfig) -> Self {
        Self {
            manifest: RunManifest {
                tool: "simdeg",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                seed: None,
                detector,
                lof: None,
                started_unix_s: now_unix_s(),
                finished_unix_s: 0,
            },
        }
    }

    fn input(mut self, path: &Path) -> Self {
        self.manifest.inputs.push(path.display().to_string());
        self
    }

    fn seed(mut self, seed: u64) -> Self {
        self.manifest.seed = Some(seed);
        self
    }

    fn lof(mut self, lof: LofConfig) -> Self {
        self.manifest.lof = Some(lof);
        self
    }

    fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.display().to_string());
    }

    fn write(mut self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join("manifest.json");
        self.manifest.outputs.push(path.display().to_string());
        self.manifest.finished_unix_s = now_unix_s();
        let text = to_canonical_json(&self.manifest)
            .map_err(|e| CliError::Usage(format!("manifest serialization: {e}")))?;
        std::fs::write(&path, text).map_err(|e| CliError::Data(e.to_string()))?;
        Ok(())
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("output directory {}: {e}", dir.display())))
}

#[derive(Serialize)]
struct Interval {
    start: usize,
    end: usize,
}

#[derive(Serialize)]
struct DetectReportDoc<'a> {
    config: &'a DetectorConfig,
    channel_ids: &'a [String],
    n_samples: usize,
    flagged_sample_counts: Vec<usize>,
    flagged_intervals: Vec<Vec<Interval>>,
    confirmed_windows: &'a [Vec<usize>],
    warnings: &'a [String],
    trace: &'a [WindowTrace],
}

fn write_report_json(
    dir: &Path,
    cfg: &DetectorConfig,
    report: &DetectionReport,
) -> Result<PathBuf, CliError> {
    let doc = DetectReportDoc {
        config: cfg,
        channel_ids: &report.channel_ids,
        n_samples: report.n_samples(),
        flagged_sample_counts: (0..report.n_channels())
            .map(|c| report.flagged_count(c))
            .collect(),
        flagged_intervals: (0..report.n_channels())
            .map(|c| {
                report
                    .flagged_intervals(c)
                    .into_iter()
                    .map(|(start, end)| Interval { start, end })
                    .collect()
            })
            .collect(),
        confirmed_windows: &report.confirmed_windows,
        warnings: &report.warnings,
        trace: &report.trace,
    };
    let path = dir.join("report.json");
    let text =
        to_canonical_json(&doc).map_err(|e| CliError::Usage(format!("report serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(path)
}

fn write_flags_csv(
    dir: &Path,
    matrix: &SignalMatrix,
    report: &DetectionReport,
) -> Result<PathBuf, CliError> {
    let path = dir.join("flags.csv");
    let file = std::fs::File::create(&path).map_err(|e| CliError::Data(e.to_string()))?;
    let mut wtr = csv::Writer::from_writer(file);
    let mut header = vec!["time".to_string()];
    header.extend(matrix.channel_ids().iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;
    for i in 0..matrix.n_samples() {
        let mut row = vec![simdeg_core::io::format_float(
            i as f64 / matrix.sample_rate_hz(),
        )];
        for c in 0..matrix.n_channels() {
            row.push(if report.flags[c][i] { "1" } else { "0" }.to_string());
        }
        wtr.write_record(&row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    wtr.flush().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(path)
}

/// Long-format CSV for plotting: one row per (sample, channel).
fn write_plot_csv(
    dir: &Path,
    matrix: &SignalMatrix,
    report: &DetectionReport,
) -> Result<PathBuf, CliError> {
    let path = dir.join("plot.csv");
    let file = std::fs::File::create(&path).map_err(|e| CliError::Data(e.to_string()))?;
    let mut wtr = csv::Writer::from_writer(file);
    wtr.write_record(["time", "channel", "value", "flagged"])
        .map_err(|e| CliError::Data(e.to_string()))?;
    for i in 0..matrix.n_samples() {
        let time = simdeg_core::io::format_float(i as f64 / matrix.sample_rate_hz());
        for c in 0..matrix.n_channels() {
            wtr.write_record([
                time.as_str(),
                matrix.channel_ids()[c].as_str(),
                &simdeg_core::io::format_float(matrix.channel(c).map_err(map_core_err)?[i]),
                if report.flags[c][i] { "1" } else { "0" },
            ])
            .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    wtr.flush().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(path)
}

/// Reads a dataset and checks its implied rate against the declared one.
fn load_matrix(input: &Path, cfg: &DetectorConfig) -> Result<SignalMatrix, CliError> {
    let dataset = simdeg_core::io::read_csv_path(input).map_err(map_core_err)?;
    let declared = cfg.sample_rate_hz;
    let implied = dataset.implied_rate_hz;
    if ((implied - declared) / declared).abs() > 1e-6 {
        return Err(CliError::Data(format!(
            "sample rate in {} is {implied:.6} Hz but the configuration declares {declared} Hz; \
             set `rate` in the config file or pass --rate",
            input.display()
        )));
    }
    dataset.into_matrix(declared).map_err(map_core_err)
}

pub fn cmd_detect(
    input: &Path,
    out: &Path,
    format: OutputFormat,
    eff: &Effective,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let matrix = load_matrix(input, &eff.detector)?;
    let report = run_stream(&matrix, &eff.detector).map_err(map_core_err)?;

    let mut manifest = ManifestBuilder::new("detect", eff.detector.clone()).input(input);
    if matches!(format, OutputFormat::All | OutputFormat::Json) {
        manifest.output(&write_report_json(out, &eff.detector, &report)?);
    }
    if matches!(format, OutputFormat::All | OutputFormat::Csv) {
        manifest.output(&write_flags_csv(out, &matrix, &report)?);
        manifest.output(&write_plot_csv(out, &matrix, &report)?);
    }
    manifest.write(out)?;

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let flagged_channels: Vec<String> = (0..report.n_channels())
        .filter(|&c| report.flagged_count(c) > 0)
        .map(|c| {
            format!(
                "{} ({} samples, {} intervals)",
                report.channel_ids[c],
                report.flagged_count(c),
                report.flagged_intervals(c).len()
            )
        })
        .collect();
    if flagged_channels.is_empty() {
        println!(
            "no low-quality data detected across {} channels, {} window positions",
            report.n_channels(),
            report.trace.len()
        );
    } else {
        println!("low-quality data detected:");
        for line in flagged_channels {
            println!("  {line}");
        }
    }
    Ok(())
}

pub fn cmd_simulate(
    out: &Path,
    channels: usize,
    duration_s: f64,
    rate_hz: f64,
    event: bool,
    seed: u64,
    eff: &Effective,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let mut spec = if event {
        ScenarioSpec::with_event(channels, duration_s, seed)
    } else {
        ScenarioSpec::normal(channels, duration_s, seed)
    };
    spec.sample_rate_hz = rate_hz;
    let (matrix, _) = generate(&spec).map_err(map_core_err)?;
    let labels = LabelMask::new(matrix.n_channels(), matrix.n_samples());

    let data_path = out.join("data.csv");
    simdeg_core::io::write_csv_path(&data_path, &matrix).map_err(map_core_err)?;
    let labels_path = out.join("labels.csv");
    simdeg_core::io::write_labels_csv_path(&labels_path, &matrix, &labels).map_err(map_core_err)?;

    let mut manifest = ManifestBuilder::new("simulate", eff.detector.clone()).seed(seed);
    manifest.output(&data_path);
    manifest.output(&labels_path);
    manifest.write(out)?;
    println!(
        "wrote {} ({} channels x {} samples at {} samples/s{})",
        data_path.display(),
        matrix.n_channels(),
        matrix.n_samples(),
        rate_hz,
        if event { ", event condition" } else { "" }
    );
    Ok(())
}

pub struct InjectArgs {
    pub kind: AnomalyKind,
    pub channels: Vec<usize>,
    pub start: usize,
    pub length: usize,
    pub magnitude: Magnitude,
    pub seed: u64,
}

pub fn parse_magnitude(text: &str) -> Result<Magnitude, CliError> {
    if text == "unobvious" {
        return Ok(Magnitude::unobvious());
    }
    if let Some(value) = text.strip_prefix("fixed:") {
        let v: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("magnitude `{text}`: bad number")))?;
        return Ok(Magnitude::Fixed(v));
    }
    if let Some(range) = text.strip_prefix("sigma:") {
        let parts: Vec<&str> = range.split(',').collect();
        if parts.len() == 2 {
            let lo = parts[0].trim().parse();
            let hi = parts[1].trim().parse();
            if let (Ok(lo), Ok(hi)) = (lo, hi) {
                return Ok(Magnitude::SigmaRange { lo, hi });
            }
        }
        return Err(CliError::Usage(format!("magnitude `{text}`: bad range")));
    }
    Err(CliError::Usage(format!(
        "magnitude `{text}` not recognized; use `unobvious`, `fixed:<v>` or `sigma:<lo>,<hi>`"
    )))
}

pub fn cmd_inject(
    input: &Path,
    out: &Path,
    args: InjectArgs,
    eff: &Effective,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let mut matrix = load_matrix(input, &eff.detector)?;
    let mut labels = LabelMask::new(matrix.n_channels(), matrix.n_samples());
    let spec = AnomalySpec {
        kind: args.kind,
        channels: args.channels,
        start: args.start,
        length: args.length,
        magnitude: args.magnitude,
        seed: args.seed,
    };
    inject(&mut matrix, &mut labels, &spec).map_err(map_core_err)?;

    let data_path = out.join("data.csv");
    simdeg_core::io::write_csv_path(&data_path, &matrix).map_err(map_core_err)?;
    let labels_path = out.join("labels.csv");
    simdeg_core::io::write_labels_csv_path(&labels_path, &matrix, &labels).map_err(map_core_err)?;

    let mut manifest = ManifestBuilder::new("inject", eff.detector.clone())
        .input(input)
        .seed(spec.seed);
    manifest.output(&data_path);
    manifest.output(&labels_path);
    manifest.write(out)?;
    let labeled: usize = (0..matrix.n_channels())
        .map(|c| labels.labeled_count(c))
        .sum();
    println!(
        "wrote {} with {labeled} injected samples across {} target channels",
        data_path.display(),
        spec.channels.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct BenchDoc {
    channels: usize,
    duration_s: f64,
    sample_rate_hz: f64,
    window_positions: usize,
    elapsed_s: f64,
    windows_per_s: f64,
    realtime_factor: f64,
}

pub fn cmd_bench(
    out: &Path,
    channels: usize,
    duration_s: f64,
    seed: u64,
    eff: &Effective,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let mut spec = ScenarioSpec::normal(channels, duration_s, seed);
    spec.sample_rate_hz = eff.detector.sample_rate_hz;
    let (matrix, _) = generate(&spec).map_err(map_core_err)?;

    run_stream(&matrix, &eff.detector).map_err(map_core_err)?; // warm-up
    let started = Instant::now();
    let report = run_stream(&matrix, &eff.detector).map_err(map_core_err)?;
    let elapsed = started.elapsed().as_secs_f64();

    let doc = BenchDoc {
        channels,
        duration_s,
        sample_rate_hz: eff.detector.sample_rate_hz,
        window_positions: report.trace.len(),
        elapsed_s: elapsed,
        windows_per_s: report.trace.len() as f64 / elapsed,
        realtime_factor: duration_s / elapsed,
    };
    let path = out.join("bench.json");
    let text =
        to_canonical_json(&doc).map_err(|e| CliError::Usage(format!("bench serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| CliError::Data(e.to_string()))?;

    let mut manifest = ManifestBuilder::new("bench", eff.detector.clone()).seed(seed);
    manifest.output(&path);
    manifest.write(out)?;
    println!(
        "{} channels, stride {}: {:.0} windows/s, {:.0}x realtime",
        channels, eff.detector.stride, doc.windows_per_s, doc.realtime_factor
    );
    Ok(())
}

#[derive(Serialize)]
struct CompareDoc<'a> {
    detector: &'a DetectorConfig,
    lof: &'a LofConfig,
    scenario: &'a ScenarioSpec,
    anomaly: &'a AnomalySpec,
    summary: &'a CompareSummary,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_compare(
    out: &Path,
    trials: usize,
    channels: usize,
    targets: usize,
    duration_s: f64,
    fdi_length: usize,
    start: Option<usize>,
    magnitude: Magnitude,
    event: bool,
    seed: u64,
    eff: &Effective,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    if targets == 0 || targets > channels {
        return Err(CliError::Usage(format!(
            "--targets {targets} must lie in 1..={channels}"
        )));
    }
    let mut scenario = if event {
        ScenarioSpec::with_event(channels, duration_s, seed)
    } else {
        ScenarioSpec::normal(channels, duration_s, seed)
    };
    scenario.sample_rate_hz = eff.detector.sample_rate_hz;
    let n_samples = (duration_s * scenario.sample_rate_hz).round() as usize;
    let default_start = (n_samples * 2) / 3;
    let anomaly = AnomalySpec {
        kind: AnomalyKind::Fdi {
            shape: FdiShape::Bias,
        },
        channels: (0..targets).collect(),
        start: start.unwrap_or(default_start),
        length: fdi_length,
        magnitude,
        seed: 0,
    };
    let cfg = CompareConfig {
        scenario,
        anomaly,
        trials,
        detector: eff.detector.clone(),
        lof: eff.lof.clone(),
    };
    let summary = monte_carlo_compare(&cfg).map_err(map_core_err)?;

    let doc = CompareDoc {
        detector: &eff.detector,
        lof: &eff.lof,
        scenario: &cfg.scenario,
        anomaly: &cfg.anomaly,
        summary: &summary,
    };
    let path = out.join("compare.json");
    let text = to_canonical_json(&doc)
        .map_err(|e| CliError::Usage(format!("compare serialization: {e}")))?;
    std::fs::write(&path, text).map_err(|e| CliError::Data(e.to_string()))?;

    let mut manifest = ManifestBuilder::new("compare", eff.detector.clone())
        .seed(seed)
        .lof(eff.lof.clone());
    manifest.output(&path);
    manifest.write(out)?;

    println!(
        "mean identified signals with false data injection ({} trials, {} of {} channels injected):",
        summary.trials, targets, channels
    );
    println!("  proposed approach  {:.2}", summary.proposed_mean);
    println!("  LOF baseline       {:.2}", summary.lof_mean);
    Ok(())
}
