//! Labeled synthetic multi-channel frequency signals.
//!
//! Regional bus-frequency channels share low-frequency oscillatory modes
//! (scaled by per-channel participation factors) and an optional common
//! event excursion, with small independent measurement noise on top. That
//! reproduces the strong cross-channel coherence of real recordings in
//! both normal and event conditions. Three anomaly types can be injected
//! with exact ground-truth labels: random spikes, repeated (stuck) data,
//! and false data injection over a common interval of several channels.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{run_stream, DetectorConfig};
use crate::error::{Error, Result};
use crate::lof::{run_lof, LofConfig};
use crate::report::DetectionReport;
use crate::signal::SignalMatrix;

/// Span used to measure the clean reference dispersion that sigma-scaled
/// anomaly magnitudes are relative to.
pub const SIGMA_REF_SPAN: usize = 80;

/// One oscillatory mode shared by every channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub freq_hz: f64,
    /// Exponential amplitude decay rate per second (0 for sustained
    /// ambient oscillation).
    pub damping_per_s: f64,
    /// Base amplitude in Hz.
    pub amplitude: f64,
    pub phase_rad: f64,
    /// Explicit per-channel participation factors; when absent they are
    /// drawn uniformly from `1 +- participation_spread`.
    pub participations: Option<Vec<f64>>,
    pub participation_spread: f64,
}

/// A frequency excursion shared identically by all channels: linear
/// decline over `ramp_s`, then exponential recovery toward a small
/// residual offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub start_s: f64,
    /// Peak decline in Hz.
    pub depth_hz: f64,
    pub ramp_s: f64,
    pub recovery_s: f64,
    /// Residual offset the recovery settles toward, in Hz.
    pub settle_hz: f64,
}

impl EventSpec {
    fn offset_at(&self, t: f64) -> f64 {
        if t < self.start_s {
            return 0.0;
        }
        let ramp_end = self.start_s + self.ramp_s;
        if t < ramp_end {
            -self.depth_hz * (t - self.start_s) / self.ramp_s
        } else {
            let dt = t - ramp_end;
            -(self.settle_hz + (self.depth_hz - self.settle_hz) * (-dt / self.recovery_s).exp())
        }
    }
}

/// Generation recipe for one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n_channels: usize,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    /// Operating point every channel hovers around, in Hz.
    pub base_frequency_hz: f64,
    pub modes: Vec<ModeSpec>,
    /// Standard deviation of the independent per-channel noise.
    pub noise_std: f64,
    pub event: Option<EventSpec>,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Normal-condition recipe: three sustained inter-area-band modes and
    /// small independent noise.
    pub fn normal(n_channels: usize, duration_s: f64, seed: u64) -> Self {
        let mode = |freq_hz: f64, amplitude: f64, phase_rad: f64| ModeSpec {
            freq_hz,
            damping_per_s: 0.0,
            amplitude,
            phase_rad,
            participations: None,
            participation_spread: 0.12,
        };
        Self {
            n_channels,
            duration_s,
            sample_rate_hz: 60.0,
            base_frequency_hz: 60.0,
            modes: vec![
                mode(0.34, 0.012, 0.0),
                mode(0.61, 0.008, 1.1),
                mode(0.92, 0.005, 2.4),
            ],
            noise_std: 4e-4,
            event: None,
            seed,
        }
    }

    /// Event-condition recipe: the normal modes plus a shared frequency
    /// decline-and-recovery starting a third of the way in.
    pub fn with_event(n_channels: usize, duration_s: f64, seed: u64) -> Self {
        let mut spec = Self::normal(n_channels, duration_s, seed);
        spec.event = Some(EventSpec {
            start_s: duration_s / 3.0,
            depth_hz: 0.05,
            ramp_s: 5.0,
            recovery_s: 8.0,
            settle_hz: 0.01,
        });
        spec
    }

    fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::InvalidScenario("need at least one channel".into()));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(self.sample_rate_hz));
        }
        let nyquist = self.sample_rate_hz / 2.0;
        for mode in &self.modes {
            if !(mode.freq_hz.is_finite() && mode.freq_hz > 0.0 && mode.freq_hz <= nyquist) {
                return Err(Error::InvalidScenario(format!(
                    "mode frequency {} Hz outside (0, {nyquist}] Hz",
                    mode.freq_hz
                )));
            }
            if let Some(p) = &mode.participations {
                if p.len() != self.n_channels {
                    return Err(Error::InvalidScenario(format!(
                        "{} participation factors for {} channels",
                        p.len(),
                        self.n_channels
                    )));
                }
            }
            if !(mode.participation_spread.is_finite() && mode.participation_spread >= 0.0) {
                return Err(Error::InvalidScenario(
                    "participation spread must be nonnegative".into(),
                ));
            }
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "noise std must be nonnegative, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// Ground-truth generation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMeta {
    pub seed: u64,
    /// Drawn (or given) participation factors, one vector per mode.
    pub participations: Vec<Vec<f64>>,
    pub event: Option<EventSpec>,
}

/// SplitMix64 derivation of per-stream seeds from `(seed, stream)`.
pub(crate) fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically generates the multi-channel dataset described by
/// `spec`.
pub fn generate(spec: &ScenarioSpec) -> Result<(SignalMatrix, ScenarioMeta)> {
    spec.validate()?;
    let n_samples = (spec.duration_s * spec.sample_rate_hz).round() as usize;
    if n_samples < 2 {
        return Err(Error::InvalidScenario(format!(
            "duration {} s at {} samples/s yields fewer than 2 samples",
            spec.duration_s, spec.sample_rate_hz
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let participations: Vec<Vec<f64>> = spec
        .modes
        .iter()
        .map(|mode| match &mode.participations {
            Some(p) => Ok(p.clone()),
            None => {
                let dist = Uniform::new_inclusive(
                    1.0 - mode.participation_spread,
                    1.0 + mode.participation_spread,
                )
                .map_err(|e| Error::InvalidScenario(e.to_string()))?;
                Ok((0..spec.n_channels).map(|_| dist.sample(&mut rng)).collect())
            }
        })
        .collect::<Result<_>>()?;

    let dt = 1.0 / spec.sample_rate_hz;
    let event_offsets: Vec<f64> = (0..n_samples)
        .map(|s| {
            spec.event
                .as_ref()
                .map_or(0.0, |e| e.offset_at(s as f64 * dt))
        })
        .collect();

    let noise = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidScenario(e.to_string()))?;
    let mut channels = Vec::with_capacity(spec.n_channels);
    for ch in 0..spec.n_channels {
        let mut samples = Vec::with_capacity(n_samples);
        for (s, &event_offset) in event_offsets.iter().enumerate() {
            let t = s as f64 * dt;
            let mut x = spec.base_frequency_hz + event_offset;
            for (mode, parts) in spec.modes.iter().zip(&participations) {
                x += parts[ch]
                    * mode.amplitude
                    * (-mode.damping_per_s * t).exp()
                    * (std::f64::consts::TAU * mode.freq_hz * t + mode.phase_rad).cos();
            }
            if spec.noise_std > 0.0 {
                x += spec.noise_std * noise.sample(&mut rng);
            }
            samples.push(x);
        }
        channels.push(samples);
    }

    let ids = (1..=spec.n_channels).map(|c| format!("f{c}")).collect();
    let matrix = SignalMatrix::new(ids, channels, spec.sample_rate_hz)?;
    Ok((
        matrix,
        ScenarioMeta {
            seed: spec.seed,
            participations,
            event: spec.event.clone(),
        },
    ))
}

/// Anomaly magnitude specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Magnitude {
    /// Absolute magnitude in signal units (Hz).
    Fixed(f64),
    /// Drawn uniformly from `[lo, hi]` multiples of the clean reference
    /// window standard deviation of the target channel (measured over
    /// [`SIGMA_REF_SPAN`] samples from the injection start).
    SigmaRange { lo: f64, hi: f64 },
}

impl Magnitude {
    /// Default "unobvious" false-data magnitude range.
    ///
    /// Calibrated so the range spans the detector's measured boundary for
    /// same-interval multi-channel injection (about 11 reference sigmas
    /// for a 10-sample bias in an 80-sample window at default settings):
    /// draws from the lower half generally escape detection while the
    /// upper half is caught, so comparisons exercise the ordering of the
    /// approaches rather than saturation.
    pub fn unobvious() -> Self {
        Magnitude::SigmaRange { lo: 5.0, hi: 60.0 }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, reference_sigma: f64) -> Result<f64> {
        match *self {
            Magnitude::Fixed(v) => Ok(v),
            Magnitude::SigmaRange { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                    return Err(Error::InvalidAnomaly(format!(
                        "sigma range [{lo}, {hi}] is not ordered and nonnegative"
                    )));
                }
                let dist = Uniform::new_inclusive(lo, hi)
                    .map_err(|e| Error::InvalidAnomaly(e.to_string()))?;
                Ok(dist.sample(rng) * reference_sigma)
            }
        }
    }
}

/// Shape of a false-data-injection segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdiShape {
    /// Constant additive offset over the segment.
    Bias,
    /// Linear additive ramp from zero to the drawn magnitude.
    Ramp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnomalyKind {
    /// `count` single-sample additive offsets at distinct random
    /// positions inside the interval.
    Spike { count: usize },
    /// The previous value is held for the whole interval.
    Repeated,
    /// Additive bias or ramp applied to the same interval of every target
    /// channel, with an independently drawn magnitude per channel.
    Fdi { shape: FdiShape },
}

/// One injection: an anomaly kind applied to `channels` over the interval
/// `[start, start + length)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalySpec {
    pub kind: AnomalyKind,
    pub channels: Vec<usize>,
    pub start: usize,
    pub length: usize,
    pub magnitude: Magnitude,
    pub seed: u64,
}

/// Exact ground-truth labels accumulated over successive injections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMask {
    mask: Vec<Vec<bool>>,
    /// Injected intervals per channel; used to reject overlapping
    /// injections.
    spans: Vec<Vec<(usize, usize)>>,
}

impl LabelMask {
    pub fn new(n_channels: usize, n_samples: usize) -> Self {
        Self {
            mask: vec![vec![false; n_samples]; n_channels],
            spans: vec![Vec::new(); n_channels],
        }
    }

    pub fn mask(&self) -> &[Vec<bool>] {
        &self.mask
    }

    pub fn labeled_count(&self, channel: usize) -> usize {
        self.mask[channel].iter().filter(|&&l| l).count()
    }

    pub fn is_labeled(&self, channel: usize, sample: usize) -> bool {
        self.mask[channel][sample]
    }

    fn overlaps(&self, channel: usize, start: usize, end: usize) -> Option<usize> {
        self.spans[channel]
            .iter()
            .find(|&&(s, e)| start < e && s < end)
            .map(|&(s, _)| s.max(start))
    }
}

/// Applies one anomaly to the matrix in place, recording exact labels.
///
/// Injections whose interval overlaps a previous injection on the same
/// channel are rejected.
pub fn inject(matrix: &mut SignalMatrix, labels: &mut LabelMask, spec: &AnomalySpec) -> Result<()> {
    let n_samples = matrix.n_samples();
    let n_channels = matrix.n_channels();
    if spec.channels.is_empty() {
        return Err(Error::InvalidAnomaly("no target channels".into()));
    }
    let mut seen = vec![false; n_channels];
    for &ch in &spec.channels {
        if ch >= n_channels {
            return Err(Error::ChannelOutOfRange {
                index: ch,
                n_channels,
            });
        }
        if seen[ch] {
            return Err(Error::InvalidAnomaly(format!(
                "channel {ch} targeted twice"
            )));
        }
        seen[ch] = true;
    }
    if spec.length == 0 {
        return Err(Error::InvalidAnomaly("length must be positive".into()));
    }
    let end = spec
        .start
        .checked_add(spec.length)
        .filter(|&e| e <= n_samples)
        .ok_or_else(|| {
            Error::InvalidAnomaly(format!(
                "interval [{}, {}) exceeds {} samples",
                spec.start,
                spec.start.saturating_add(spec.length),
                n_samples
            ))
        })?;
    if matches!(spec.kind, AnomalyKind::Repeated) && spec.start == 0 {
        return Err(Error::InvalidAnomaly(
            "repeated-data injection needs a sample before the interval to hold".into(),
        ));
    }
    if let AnomalyKind::Spike { count } = spec.kind {
        if count == 0 || count > spec.length {
            return Err(Error::InvalidAnomaly(format!(
                "spike count {count} outside 1..={}",
                spec.length
            )));
        }
    }
    for &ch in &spec.channels {
        if let Some(at) = labels.overlaps(ch, spec.start, end) {
            return Err(Error::AnomalyOverlap {
                channel: ch,
                index: at,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for &ch in &spec.channels {
        let ref_end = (spec.start + SIGMA_REF_SPAN).min(n_samples);
        let reference_sigma = crate::similarity::sigma_of(&matrix.channel(ch)?[spec.start..ref_end.max(spec.start + 2)]);
        let chan = matrix.channel_mut(ch);
        match spec.kind {
            AnomalyKind::Spike { count } => {
                let mut positions: Vec<usize> = (spec.start..end).collect();
                // Partial Fisher-Yates: the first `count` entries become
                // the spike positions.
                for i in 0..count {
                    let j = rng.random_range(i..positions.len());
                    positions.swap(i, j);
                }
                let mut chosen = positions[..count].to_vec();
                chosen.sort_unstable();
                for &pos in &chosen {
                    let magnitude = spec.magnitude.draw(&mut rng, reference_sigma)?;
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    chan[pos] += sign * magnitude;
                    labels.mask[ch][pos] = true;
                }
            }
            AnomalyKind::Repeated => {
                let held = chan[spec.start - 1];
                let marks = &mut labels.mask[ch][spec.start..end];
                for (x, mark) in chan[spec.start..end].iter_mut().zip(marks) {
                    *x = held;
                    *mark = true;
                }
            }
            AnomalyKind::Fdi { shape } => {
                let magnitude = spec.magnitude.draw(&mut rng, reference_sigma)?;
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                for (i, idx) in (spec.start..end).enumerate() {
                    let factor = match shape {
                        FdiShape::Bias => 1.0,
                        FdiShape::Ramp => (i + 1) as f64 / spec.length as f64,
                    };
                    chan[idx] += sign * magnitude * factor;
                    labels.mask[ch][idx] = true;
                }
            }
        }
        labels.spans[ch].push((spec.start, end));
    }
    Ok(())
}

/// Two 80-sample windows at 60 samples/s with equal standard deviation
/// but disjoint dominant frequency content, one concentrated low in the
/// analysis band and one high, with deliberate phase offsets at every
/// shared bin. Time-domain dispersion cannot tell them apart while the
/// spectral indices can.
pub fn equal_sigma_pair() -> (Vec<f64>, Vec<f64>) {
    const LEN: usize = 80;
    // Amplitudes at bins 1..=6 (0.75 Hz steps); mirrored sets carry equal
    // energy, so the standard deviations agree exactly.
    let amps_low = [1.0, 0.5, 0.02, 0.01, 0.01, 0.01];
    let amps_high = [0.01, 0.01, 0.01, 0.02, 0.5, 1.0];
    let phase_offsets = [
        std::f64::consts::PI,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
    ];
    let sample = |amps: &[f64; 6], phases: bool, n: usize| -> f64 {
        amps.iter()
            .enumerate()
            .map(|(m, &a)| {
                let bin = (m + 1) as f64;
                let phase = if phases { phase_offsets[m] } else { 0.0 };
                a * (std::f64::consts::TAU * bin * n as f64 / LEN as f64 + phase).cos()
            })
            .sum()
    };
    let first = (0..LEN).map(|n| sample(&amps_low, false, n)).collect();
    let second = (0..LEN).map(|n| sample(&amps_high, true, n)).collect();
    (first, second)
}

/// Monte-Carlo comparison setup: per trial the scenario is regenerated,
/// the anomaly template is injected with freshly drawn magnitudes, and
/// both detectors run.
#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub scenario: ScenarioSpec,
    /// Template injection; its `seed` is ignored and re-derived per trial
    /// from the scenario seed.
    pub anomaly: AnomalySpec,
    pub trials: usize,
    pub detector: DetectorConfig,
    pub lof: LofConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    /// Target channels the similarity detector identified.
    pub proposed_hits: Vec<usize>,
    /// Target channels the LOF baseline identified.
    pub lof_hits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub trials: usize,
    /// Mean number of injected channels identified by the similarity
    /// detector.
    pub proposed_mean: f64,
    /// Mean number of injected channels identified by the LOF baseline.
    pub lof_mean: f64,
    pub outcomes: Vec<TrialOutcome>,
}

/// A channel counts as identified when at least one of its samples inside
/// the injected interval is flagged.
fn identified_targets(report: &DetectionReport, anomaly: &AnomalySpec) -> Vec<usize> {
    anomaly
        .channels
        .iter()
        .copied()
        .filter(|&ch| {
            report.flags[ch][anomaly.start..anomaly.start + anomaly.length]
                .iter()
                .any(|&f| f)
        })
        .collect()
}

/// Runs `trials` independent simulations and reports the mean number of
/// injected channels each approach identifies.
pub fn monte_carlo_compare(cfg: &CompareConfig) -> Result<CompareSummary> {
    if cfg.trials == 0 {
        return Err(Error::InvalidScenario("need at least one trial".into()));
    }
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialOutcome> {
            let mut scenario = cfg.scenario.clone();
            scenario.seed = derive_seed(cfg.scenario.seed, 2 * trial as u64);
            let (mut matrix, _) = generate(&scenario)?;
            let mut anomaly = cfg.anomaly.clone();
            anomaly.seed = derive_seed(cfg.scenario.seed, 2 * trial as u64 + 1);
            let mut labels = LabelMask::new(matrix.n_channels(), matrix.n_samples());
            inject(&mut matrix, &mut labels, &anomaly)?;

            let proposed = run_stream(&matrix, &cfg.detector)?;
            let baseline = run_lof(&matrix, &cfg.lof)?;
            Ok(TrialOutcome {
                trial,
                proposed_hits: identified_targets(&proposed, &anomaly),
                lof_hits: identified_targets(&baseline, &anomaly),
            })
        })
        .collect::<Result<_>>()?;

    let n = cfg.trials as f64;
    let proposed_mean = outcomes.iter().map(|o| o.proposed_hits.len() as f64).sum::<f64>() / n;
    let lof_mean = outcomes.iter().map(|o| o.lof_hits.len() as f64).sum::<f64>() / n;
    Ok(CompareSummary {
        trials: cfg.trials,
        proposed_mean,
        lof_mean,
        outcomes,
    })
}
