//! Sliding-window low-quality data detection.
//!
//! Each window position scores every channel by its similarity degree
//! against all peers; a channel whose score falls below the threshold is a
//! candidate, and it is confirmed only when the required number of
//! immediately preceding positions were candidates as well. Confirmation
//! flags all samples of the confirming window. The confirmation run
//! suppresses isolated false alarms, so one freak window never flags data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimilarityConfig;
use crate::error::{Error, Result};
use crate::report::{DetectionReport, WindowTrace};
use crate::signal::{SignalMatrix, WindowView};
use crate::similarity::{
    band_indices, bin_freqs, channel_signatures, degrees_from_signatures,
};
use crate::spectrum::SpectrumAnalyzer;

/// Relative tolerance for the declared-vs-actual sample rate check.
const RATE_TOLERANCE: f64 = 1e-9;

/// Sliding-window detector parameters.
///
/// Defaults: 80-sample windows advanced one sample at a time, threshold
/// 0.3, 15 consecutive prior detections required, 60 samples/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub sim: SimilarityConfig,
    /// Moving window length in samples.
    pub window_len: usize,
    /// Window advance per position in samples.
    pub stride: usize,
    /// Detection threshold: a channel is a candidate iff its similarity
    /// degree is strictly below this value.
    pub zeta: f64,
    /// Number of immediately preceding candidate positions required
    /// before a candidate window confirms and flags its samples.
    pub confirm_windows: usize,
    /// Declared sample rate. Never inferred from data; a mismatching
    /// input is rejected.
    pub sample_rate_hz: f64,
    /// When set, a confirmation also flags the samples of the candidate
    /// windows that formed its confirmation run.
    pub flag_preceding_run: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            sim: SimilarityConfig::default(),
            window_len: 80,
            stride: 1,
            zeta: 0.3,
            confirm_windows: 15,
            sample_rate_hz: 60.0,
            flag_preceding_run: false,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::InvalidConfig(format!(
                "window_len must be at least 2, got {}",
                self.window_len
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0 && self.zeta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "zeta must lie in [0, 1), got {}",
                self.zeta
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(self.sample_rate_hz));
        }
        self.sim.validate_for_rate(self.sample_rate_hz)
    }
}

/// Similarity degree and candidate status of one channel at one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDecision {
    pub similarity_degree: f64,
    pub candidate: bool,
}

fn check_rate(matrix: &SignalMatrix, declared_hz: f64) -> Result<()> {
    let actual = matrix.sample_rate_hz();
    if (actual - declared_hz).abs() > RATE_TOLERANCE * declared_hz.abs() {
        return Err(Error::SampleRateMismatch {
            left: actual,
            right: declared_hz,
        });
    }
    Ok(())
}

fn check_channels(matrix: &SignalMatrix) -> Result<()> {
    if matrix.n_channels() < 2 {
        return Err(Error::TooFewChannels {
            required: 2,
            got: matrix.n_channels(),
        });
    }
    Ok(())
}

pub(crate) fn similarity_window_scores(
    windows: &[WindowView<'_>],
    analyzer: &mut SpectrumAnalyzer,
    band: &[usize],
    sim: &SimilarityConfig,
    zeta: f64,
) -> Vec<(f64, bool)> {
    let signatures = channel_signatures(windows, analyzer, band);
    degrees_from_signatures(&signatures, sim)
        .into_iter()
        .map(|d| (d, d < zeta))
        .collect()
}

/// Scores one window position of the matrix.
pub fn detect_window(
    matrix: &SignalMatrix,
    start: usize,
    cfg: &DetectorConfig,
) -> Result<Vec<WindowDecision>> {
    cfg.validate()?;
    check_channels(matrix)?;
    check_rate(matrix, cfg.sample_rate_hz)?;
    let band = band_indices(
        &bin_freqs(cfg.window_len, matrix.sample_rate_hz()),
        &cfg.sim,
    )?;
    let windows = matrix.windows_at(start, cfg.window_len)?;
    let mut analyzer = SpectrumAnalyzer::new();
    Ok(
        similarity_window_scores(&windows, &mut analyzer, &band, &cfg.sim, cfg.zeta)
            .into_iter()
            .map(|(similarity_degree, candidate)| WindowDecision {
                similarity_degree,
                candidate,
            })
            .collect(),
    )
}

pub(crate) struct SlidingParams {
    pub window_len: usize,
    pub stride: usize,
    pub confirm_windows: usize,
    pub flag_preceding_run: bool,
}

fn too_few_positions_warning(positions: usize, needed: usize) -> String {
    format!(
        "only {positions} window positions available but confirmation needs {needed}; \
         no data can be flagged"
    )
}

/// Tracks candidate runs and flags confirmed windows. Shared by the
/// offline engine and the streaming detector so both produce identical
/// reports.
struct ConfirmationState {
    confirm_windows: usize,
    flag_preceding_run: bool,
    run_lens: Vec<usize>,
    confirmed: Vec<Vec<usize>>,
    flagged_windows: Vec<Vec<usize>>,
}

impl ConfirmationState {
    fn new(n_channels: usize, confirm_windows: usize, flag_preceding_run: bool) -> Self {
        Self {
            confirm_windows,
            flag_preceding_run,
            run_lens: vec![0; n_channels],
            confirmed: vec![Vec::new(); n_channels],
            flagged_windows: vec![Vec::new(); n_channels],
        }
    }

    /// Applies one position's candidate decisions; returns the channels
    /// confirmed at this position.
    fn advance(&mut self, start: usize, stride: usize, candidates: &[bool]) -> Vec<usize> {
        let mut fired = Vec::new();
        for (ch, &candidate) in candidates.iter().enumerate() {
            if !candidate {
                self.run_lens[ch] = 0;
                continue;
            }
            self.run_lens[ch] += 1;
            if self.run_lens[ch] < self.confirm_windows + 1 {
                continue;
            }
            self.confirmed[ch].push(start);
            self.flagged_windows[ch].push(start);
            if self.flag_preceding_run && self.run_lens[ch] == self.confirm_windows + 1 {
                // First confirmation of this run: optionally flag the
                // candidate windows that formed it.
                for back in 1..=self.confirm_windows {
                    self.flagged_windows[ch].push(start - back * stride);
                }
            }
            fired.push(ch);
        }
        fired
    }
}

fn materialize_flags(
    flagged_windows: &[Vec<usize>],
    n_samples: usize,
    window_len: usize,
) -> Vec<Vec<bool>> {
    flagged_windows
        .iter()
        .map(|starts| {
            let mut mask = vec![false; n_samples];
            for &s in starts {
                for flag in mask.iter_mut().skip(s).take(window_len) {
                    *flag = true;
                }
            }
            mask
        })
        .collect()
}

pub(crate) fn run_sliding<F>(
    matrix: &SignalMatrix,
    params: &SlidingParams,
    scorer: F,
) -> Result<DetectionReport>
where
    F: Fn(usize) -> Result<Vec<(f64, bool)>> + Sync,
{
    let n_channels = matrix.n_channels();
    let positions: Vec<usize> = (0..)
        .map(|k| k * params.stride)
        .take_while(|&s| s + params.window_len <= matrix.n_samples())
        .collect();

    let rows: Vec<Vec<(f64, bool)>> = positions
        .par_iter()
        .map(|&start| scorer(start))
        .collect::<Result<_>>()?;

    let mut state =
        ConfirmationState::new(n_channels, params.confirm_windows, params.flag_preceding_run);
    let mut trace = Vec::with_capacity(positions.len());
    for (&start, row) in positions.iter().zip(&rows) {
        let candidates: Vec<bool> = row.iter().map(|&(_, c)| c).collect();
        state.advance(start, params.stride, &candidates);
        trace.push(WindowTrace {
            start,
            scores: row.iter().map(|&(s, _)| s).collect(),
        });
    }

    let mut warnings = Vec::new();
    if positions.len() < params.confirm_windows + 1 {
        warnings.push(too_few_positions_warning(
            positions.len(),
            params.confirm_windows + 1,
        ));
    }

    Ok(DetectionReport {
        channel_ids: matrix.channel_ids().to_vec(),
        flags: materialize_flags(&state.flagged_windows, matrix.n_samples(), params.window_len),
        trace,
        confirmed_windows: state.confirmed,
        warnings,
    })
}

/// Runs the detector over the whole matrix.
pub fn run_stream(matrix: &SignalMatrix, cfg: &DetectorConfig) -> Result<DetectionReport> {
    cfg.validate()?;
    check_channels(matrix)?;
    check_rate(matrix, cfg.sample_rate_hz)?;
    let band = band_indices(
        &bin_freqs(cfg.window_len, matrix.sample_rate_hz()),
        &cfg.sim,
    )?;
    let params = SlidingParams {
        window_len: cfg.window_len,
        stride: cfg.stride,
        confirm_windows: cfg.confirm_windows,
        flag_preceding_run: cfg.flag_preceding_run,
    };
    run_sliding(matrix, &params, |start| {
        let windows = matrix.windows_at(start, cfg.window_len)?;
        let mut analyzer = SpectrumAnalyzer::new();
        Ok(similarity_window_scores(
            &windows,
            &mut analyzer,
            &band,
            &cfg.sim,
            cfg.zeta,
        ))
    })
}

/// Incremental report produced by one [`StreamDetector::push_samples`]
/// call.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamDelta {
    /// Window positions evaluated by this push.
    pub new_trace: Vec<WindowTrace>,
    /// `(channel, window start)` pairs confirmed by this push.
    pub newly_confirmed: Vec<(usize, usize)>,
}

/// Online detector: accepts per-channel sample batches and produces the
/// same report as [`run_stream`] over the concatenated history.
///
/// Only the unconsumed window tail is buffered, so memory stays bounded
/// regardless of stream length.
pub struct StreamDetector {
    cfg: DetectorConfig,
    channel_ids: Vec<String>,
    band: Vec<usize>,
    analyzer: SpectrumAnalyzer,
    buffers: Vec<Vec<f64>>,
    /// Absolute sample index of `buffers[*][0]`.
    buffer_start: usize,
    samples_seen: usize,
    next_start: usize,
    state: ConfirmationState,
    trace: Vec<WindowTrace>,
}

impl StreamDetector {
    pub fn new(channel_ids: Vec<String>, cfg: DetectorConfig) -> Result<Self> {
        cfg.validate()?;
        if channel_ids.len() < 2 {
            return Err(Error::TooFewChannels {
                required: 2,
                got: channel_ids.len(),
            });
        }
        let band = band_indices(&bin_freqs(cfg.window_len, cfg.sample_rate_hz), &cfg.sim)?;
        let n = channel_ids.len();
        let state = ConfirmationState::new(n, cfg.confirm_windows, cfg.flag_preceding_run);
        Ok(Self {
            cfg,
            channel_ids,
            band,
            analyzer: SpectrumAnalyzer::new(),
            buffers: vec![Vec::new(); n],
            buffer_start: 0,
            samples_seen: 0,
            next_start: 0,
            state,
            trace: Vec::new(),
        })
    }

    pub fn n_channels(&self) -> usize {
        self.channel_ids.len()
    }

    pub fn samples_seen(&self) -> usize {
        self.samples_seen
    }

    /// Appends one batch of synchronized samples (one slice per channel,
    /// equal lengths) and evaluates every window position that became
    /// complete. An empty batch is a no-op.
    pub fn push_samples(&mut self, batch: &[&[f64]]) -> Result<StreamDelta> {
        if batch.len() != self.n_channels() {
            return Err(Error::ChannelCountMismatch {
                expected: self.n_channels(),
                got: batch.len(),
            });
        }
        let added = batch.first().map_or(0, |c| c.len());
        if batch.iter().any(|c| c.len() != added) {
            return Err(Error::RaggedBatch);
        }
        for (ch, chunk) in batch.iter().enumerate() {
            if let Some(i) = chunk.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteSample {
                    channel: self.channel_ids[ch].clone(),
                    index: self.samples_seen + i,
                });
            }
        }
        for (buf, chunk) in self.buffers.iter_mut().zip(batch) {
            buf.extend_from_slice(chunk);
        }
        self.samples_seen += added;

        let mut delta = StreamDelta {
            new_trace: Vec::new(),
            newly_confirmed: Vec::new(),
        };
        while self.next_start + self.cfg.window_len <= self.samples_seen {
            let start = self.next_start;
            let offset = start - self.buffer_start;
            let windows: Vec<WindowView<'_>> = self
                .buffers
                .iter()
                .zip(&self.channel_ids)
                .map(|(buf, id)| {
                    WindowView::new(
                        &buf[offset..offset + self.cfg.window_len],
                        self.cfg.sample_rate_hz,
                        id,
                    )
                })
                .collect::<Result<_>>()?;
            let row = similarity_window_scores(
                &windows,
                &mut self.analyzer,
                &self.band,
                &self.cfg.sim,
                self.cfg.zeta,
            );
            let candidates: Vec<bool> = row.iter().map(|&(_, c)| c).collect();
            for ch in self.state.advance(start, self.cfg.stride, &candidates) {
                delta.newly_confirmed.push((ch, start));
            }
            let trace_row = WindowTrace {
                start,
                scores: row.iter().map(|&(s, _)| s).collect(),
            };
            self.trace.push(trace_row.clone());
            delta.new_trace.push(trace_row);
            self.next_start += self.cfg.stride;
        }

        // Drop fully consumed history, keeping the tail the next window
        // still needs.
        let keep_from = self.next_start.min(self.samples_seen);
        if keep_from > self.buffer_start {
            let drop = keep_from - self.buffer_start;
            for buf in &mut self.buffers {
                buf.drain(..drop);
            }
            self.buffer_start = keep_from;
        }
        Ok(delta)
    }

    /// Full report over everything pushed so far; equals `run_stream` on
    /// the concatenated history.
    pub fn report(&self) -> DetectionReport {
        let mut warnings = Vec::new();
        if self.trace.len() < self.cfg.confirm_windows + 1 {
            warnings.push(too_few_positions_warning(
                self.trace.len(),
                self.cfg.confirm_windows + 1,
            ));
        }
        DetectionReport {
            channel_ids: self.channel_ids.clone(),
            flags: materialize_flags(
                &self.state.flagged_windows,
                self.samples_seen,
                self.cfg.window_len,
            ),
            trace: self.trace.clone(),
            confirmed_windows: self.state.confirmed.clone(),
            warnings,
        }
    }
}
