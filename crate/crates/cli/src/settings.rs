//! Effective configuration assembly: built-in defaults, overlaid by an
//! optional JSON config file, overlaid by command-line flags.

use std::path::Path;

use serde::Deserialize;

use simdeg_core::{DetectorConfig, LofConfig};

use crate::CliError;

/// Optional settings accepted in a `--config` JSON file. Field names
/// match the corresponding command-line flags.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub zeta: Option<f64>,
    pub confirm: Option<usize>,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub weights: Option<[f64; 3]>,
    pub band: Option<[f64; 2]>,
    pub include_dc: Option<bool>,
    pub rate: Option<f64>,
    pub flag_preceding_run: Option<bool>,
    pub lof_k: Option<usize>,
    pub lof_threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }
}

/// Detector-related flags shared by the subcommands.
#[derive(Debug, Clone, clap::Args)]
pub struct DetectorFlags {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,
    /// Moving window length in samples.
    #[arg(long, global = true, value_name = "SAMPLES")]
    pub window: Option<usize>,
    /// Window advance per position in samples.
    #[arg(long, global = true, value_name = "SAMPLES")]
    pub stride: Option<usize>,
    /// Detection threshold on the similarity degree.
    #[arg(long, global = true, value_name = "VALUE")]
    pub zeta: Option<f64>,
    /// Consecutive prior detections required before flagging.
    #[arg(long, global = true, value_name = "COUNT")]
    pub confirm: Option<usize>,
    /// Magnitude-distance sensitivity.
    #[arg(long, global = true, value_name = "VALUE")]
    pub lambda: Option<f64>,
    /// Phase-distance sensitivity.
    #[arg(long, global = true, value_name = "VALUE")]
    pub epsilon: Option<f64>,
    /// Index weights as `dcs,fms,fps` (must sum to 1).
    #[arg(long, global = true, value_name = "A,B,C")]
    pub weights: Option<String>,
    /// Analysis band as `low,high` in Hz.
    #[arg(long, global = true, value_name = "LO,HI")]
    pub band: Option<String>,
    /// Retain the DC bin of the analysis band.
    #[arg(long, global = true)]
    pub include_dc: bool,
    /// Declared sample rate in samples per second.
    #[arg(long, global = true, value_name = "HZ")]
    pub rate: Option<f64>,
    /// On confirmation, also flag the windows of the confirmation run.
    #[arg(long, global = true)]
    pub flag_preceding_run: bool,
    /// LOF neighbor count (comparison baseline).
    #[arg(long, global = true, value_name = "K")]
    pub lof_k: Option<usize>,
    /// LOF score threshold (comparison baseline).
    #[arg(long, global = true, value_name = "VALUE")]
    pub lof_threshold: Option<f64>,
}

fn parse_pair(text: &str, flag: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "--{flag} expects two comma-separated numbers, got `{text}`"
        )));
    }
    let mut out = [0.0; 2];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{flag}: `{part}` is not a number")))?;
    }
    Ok(out)
}

fn parse_triple(text: &str, flag: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--{flag} expects three comma-separated numbers, got `{text}`"
        )));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{flag}: `{part}` is not a number")))?;
    }
    Ok(out)
}

/// Effective detector and baseline configuration after precedence:
/// flag > config file > built-in default.
pub struct Effective {
    pub detector: DetectorConfig,
    pub lof: LofConfig,
}

pub fn resolve(flags: &DetectorFlags) -> Result<Effective, CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let mut detector = DetectorConfig::default();
    if let Some(v) = file.window {
        detector.window_len = v;
    }
    if let Some(v) = file.stride {
        detector.stride = v;
    }
    if let Some(v) = file.zeta {
        detector.zeta = v;
    }
    if let Some(v) = file.confirm {
        detector.confirm_windows = v;
    }
    if let Some(v) = file.lambda {
        detector.sim.lambda = v;
    }
    if let Some(v) = file.epsilon {
        detector.sim.epsilon = v;
    }
    if let Some([a, b, c]) = file.weights {
        detector.sim.w_dcs = a;
        detector.sim.w_fms = b;
        detector.sim.w_fps = c;
    }
    if let Some([lo, hi]) = file.band {
        detector.sim.band_low_hz = lo;
        detector.sim.band_high_hz = hi;
    }
    if let Some(v) = file.include_dc {
        detector.sim.include_dc = v;
    }
    if let Some(v) = file.rate {
        detector.sample_rate_hz = v;
    }
    if let Some(v) = file.flag_preceding_run {
        detector.flag_preceding_run = v;
    }

    if let Some(v) = flags.window {
        detector.window_len = v;
    }
    if let Some(v) = flags.stride {
        detector.stride = v;
    }
    if let Some(v) = flags.zeta {
        detector.zeta = v;
    }
    if let Some(v) = flags.confirm {
        detector.confirm_windows = v;
    }
    if let Some(v) = flags.lambda {
        detector.sim.lambda = v;
    }
    if let Some(v) = flags.epsilon {
        detector.sim.epsilon = v;
    }
    if let Some(text) = &flags.weights {
        let [a, b, c] = parse_triple(text, "weights")?;
        detector.sim.w_dcs = a;
        detector.sim.w_fms = b;
        detector.sim.w_fps = c;
    }
    if let Some(text) = &flags.band {
        let [lo, hi] = parse_pair(text, "band")?;
        detector.sim.band_low_hz = lo;
        detector.sim.band_high_hz = hi;
    }
    if flags.include_dc {
        detector.sim.include_dc = true;
    }
    if let Some(v) = flags.rate {
        detector.sample_rate_hz = v;
    }
    if flags.flag_preceding_run {
        detector.flag_preceding_run = true;
    }

    detector
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut lof = LofConfig {
        window_len: detector.window_len,
        stride: detector.stride,
        confirm_windows: detector.confirm_windows,
        ..Default::default()
    };
    if let Some(v) = file.lof_k {
        lof.k_neighbors = v;
    }
    if let Some(v) = file.lof_threshold {
        lof.threshold = v;
    }
    if let Some(v) = flags.lof_k {
        lof.k_neighbors = v;
    }
    if let Some(v) = flags.lof_threshold {
        lof.threshold = v;
    }
    lof.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    Ok(Effective { detector, lof })
}

pub fn parse_channel_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{part}` is not a channel index")))
        })
        .collect()
}
