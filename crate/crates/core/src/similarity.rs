//! Pairwise similarity indices for equal-length signal windows.
//!
//! Three indices quantify how alike two windows are:
//!
//! * dynamic-change similarity `e^(1-gamma)`, where `gamma` is the larger
//!   ratio of the two window standard deviations;
//! * frequency-magnitude similarity, the band average of
//!   `1 - tanh(|20*log10|H(f)|| / lambda)` with `|H(f)|` the spectral
//!   magnitude ratio;
//! * frequency-phase similarity, the band average of
//!   `1 - tanh(|phi(f)| / (2*pi*epsilon))` with `phi(f)` the wrapped
//!   spectral phase difference.
//!
//! Their weighted sum is the pair similarity degree, and a channel's
//! similarity degree is the mean over its pairs with every other channel.
//! Every index lies in (0, 1] for finite inputs with positive dispersion
//! and is invariant under swapping the two windows.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::config::SimilarityConfig;
use crate::error::{Error, Result};
use crate::signal::WindowView;
use crate::spectrum::{wrap_angle, Spectrum, SpectrumAnalyzer};

/// Bins whose magnitude falls below `DELTA_SCALE` times the largest
/// magnitude of the pair are treated as empty.
const DELTA_SCALE: f64 = 1e-12;

/// Magnitude distance charged when exactly one side of a bin is empty.
const ONE_SIDED_DB: f64 = 300.0;

/// The four similarity values of one window pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairIndices {
    /// Dynamic-change similarity (standard-deviation ratio), in (0, 1].
    pub dynamic_change: f64,
    /// Frequency-magnitude similarity over the analysis band, in (0, 1].
    pub freq_magnitude: f64,
    /// Frequency-phase similarity over the analysis band, in (0, 1].
    pub freq_phase: f64,
    /// Weighted combination of the three indices, in (0, 1].
    pub similarity_degree: f64,
}

/// Population standard deviation of a window.
///
/// Two-pass mean/variance; a window whose samples are all equal reports
/// exactly zero so that repeated-data segments are recognized as such.
pub fn std_dev(window: &WindowView<'_>) -> f64 {
    sigma_of(window.samples())
}

pub(crate) fn sigma_of(samples: &[f64]) -> f64 {
    debug_assert!(samples.len() >= 2);
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt()
}

/// Dynamic-change similarity of two equal-length windows.
///
/// Degenerate dispersion is resolved by continuity: two constant windows
/// are maximally similar (1), a constant window against a live one is
/// maximally dissimilar (0, the `gamma -> inf` limit).
pub fn dynamic_change_similarity(wi: &WindowView<'_>, wj: &WindowView<'_>) -> Result<f64> {
    check_same_length(wi, wj)?;
    Ok(dcs_from_sigmas(std_dev(wi), std_dev(wj)))
}

pub(crate) fn dcs_from_sigmas(sigma_i: f64, sigma_j: f64) -> f64 {
    match (sigma_i == 0.0, sigma_j == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => {
            let gamma = (sigma_i / sigma_j).max(sigma_j / sigma_i);
            (1.0 - gamma).exp()
        }
    }
}

/// `1 - tanh(d / lambda)` for a magnitude distance `d` in dB.
fn magnitude_map(db_distance: f64, lambda: f64) -> f64 {
    1.0 - (db_distance / lambda).tanh()
}

/// `1 - tanh(|phi| / (2*pi*epsilon))` for a wrapped angle `phi`.
fn phase_map(abs_angle: f64, epsilon: f64) -> f64 {
    1.0 - (abs_angle / (TAU * epsilon)).tanh()
}

fn bin_magnitude_similarity(mag_i: f64, mag_j: f64, delta: f64, lambda: f64) -> f64 {
    let empty_i = mag_i <= delta;
    let empty_j = mag_j <= delta;
    if empty_i && empty_j {
        // The bin carries no energy on either side: no evidence of
        // dissimilarity.
        1.0
    } else if empty_i != empty_j {
        magnitude_map(ONE_SIDED_DB, lambda)
    } else {
        magnitude_map((20.0 * (mag_j / mag_i).log10()).abs(), lambda)
    }
}

fn bin_phase_similarity(
    mag_i: f64,
    mag_j: f64,
    phase_i: f64,
    phase_j: f64,
    delta: f64,
    epsilon: f64,
) -> f64 {
    if mag_i <= delta && mag_j <= delta {
        1.0
    } else {
        phase_map(wrap_angle(phase_j - phase_i).abs(), epsilon)
    }
}

/// Bin frequencies of an `len`-sample window at `rate` Hz.
pub(crate) fn bin_freqs(len: usize, rate: f64) -> Vec<f64> {
    (0..len / 2 + 1)
        .map(|k| k as f64 * rate / len as f64)
        .collect()
}

/// Indices of the spectrum bins retained by the analysis band.
///
/// A bin at frequency `f` is kept iff `band_low < f <= band_high`, with
/// the lower comparison relaxed to `<=` when `include_dc` is set.
pub(crate) fn band_indices(freqs_hz: &[f64], cfg: &SimilarityConfig) -> Result<Vec<usize>> {
    let keep_low = |f: f64| {
        if cfg.include_dc {
            f >= cfg.band_low_hz
        } else {
            f > cfg.band_low_hz
        }
    };
    let idx: Vec<usize> = freqs_hz
        .iter()
        .enumerate()
        .filter(|&(_, &f)| keep_low(f) && f <= cfg.band_high_hz)
        .map(|(k, _)| k)
        .collect();
    if idx.is_empty() {
        return Err(Error::EmptyBand {
            low_hz: cfg.band_low_hz,
            high_hz: cfg.band_high_hz,
            resolution_hz: if freqs_hz.len() >= 2 {
                freqs_hz[1] - freqs_hz[0]
            } else {
                0.0
            },
        });
    }
    Ok(idx)
}

fn check_compatible(si: &Spectrum, sj: &Spectrum) -> Result<()> {
    if si.len() != sj.len() {
        return Err(Error::SpectrumMismatch(format!(
            "{} vs {} bins",
            si.len(),
            sj.len()
        )));
    }
    if si.freqs_hz != sj.freqs_hz {
        return Err(Error::SpectrumMismatch(
            "bin frequencies differ".to_string(),
        ));
    }
    Ok(())
}

fn pair_delta(si: &Spectrum, sj: &Spectrum) -> f64 {
    let max_i = si.magnitude.iter().cloned().fold(0.0, f64::max);
    let max_j = sj.magnitude.iter().cloned().fold(0.0, f64::max);
    DELTA_SCALE * max_i.max(max_j)
}

/// Per-bin magnitude similarity `(f, S(f))` over the analysis band.
pub fn magnitude_distance_profile(
    si: &Spectrum,
    sj: &Spectrum,
    cfg: &SimilarityConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    check_compatible(si, sj)?;
    let idx = band_indices(&si.freqs_hz, cfg)?;
    let delta = pair_delta(si, sj);
    Ok(idx
        .into_iter()
        .map(|k| {
            (
                si.freqs_hz[k],
                bin_magnitude_similarity(si.magnitude[k], sj.magnitude[k], delta, cfg.lambda),
            )
        })
        .collect())
}

/// Per-bin phase similarity `(f, A(f))` over the analysis band.
pub fn phase_distance_profile(
    si: &Spectrum,
    sj: &Spectrum,
    cfg: &SimilarityConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    check_compatible(si, sj)?;
    let idx = band_indices(&si.freqs_hz, cfg)?;
    let delta = pair_delta(si, sj);
    Ok(idx
        .into_iter()
        .map(|k| {
            (
                si.freqs_hz[k],
                bin_phase_similarity(
                    si.magnitude[k],
                    sj.magnitude[k],
                    si.phase[k],
                    sj.phase[k],
                    delta,
                    cfg.epsilon,
                ),
            )
        })
        .collect())
}

/// Mean of the per-bin magnitude similarities.
pub fn frequency_magnitude_similarity(profile: &[(f64, f64)]) -> Result<f64> {
    profile_mean(profile)
}

/// Mean of the per-bin phase similarities.
pub fn frequency_phase_similarity(profile: &[(f64, f64)]) -> Result<f64> {
    profile_mean(profile)
}

fn profile_mean(profile: &[(f64, f64)]) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(profile.iter().map(|&(_, v)| v).sum::<f64>() / profile.len() as f64)
}

pub(crate) fn weighted_similarity(cfg: &SimilarityConfig, dcs: f64, fms: f64, fps: f64) -> f64 {
    cfg.w_dcs * dcs + cfg.w_fms * fms + cfg.w_fps * fps
}

/// Precomputed per-channel inputs to pairwise index evaluation: the window
/// standard deviation plus the band-restricted spectral content.
#[derive(Debug, Clone)]
pub(crate) struct ChannelSignature {
    pub sigma: f64,
    pub max_magnitude: f64,
    pub band_magnitude: Vec<f64>,
    pub band_phase: Vec<f64>,
}

impl ChannelSignature {
    pub(crate) fn from_spectrum(sigma: f64, spectrum: &Spectrum, band: &[usize]) -> Self {
        Self {
            sigma,
            max_magnitude: spectrum.magnitude.iter().cloned().fold(0.0, f64::max),
            band_magnitude: band.iter().map(|&k| spectrum.magnitude[k]).collect(),
            band_phase: band.iter().map(|&k| spectrum.phase[k]).collect(),
        }
    }
}

/// Builds signatures for one window position across channels, reusing one
/// analyzer (and thus one FFT plan).
pub(crate) fn channel_signatures(
    windows: &[WindowView<'_>],
    analyzer: &mut SpectrumAnalyzer,
    band: &[usize],
) -> Vec<ChannelSignature> {
    windows
        .iter()
        .map(|w| {
            let spectrum = analyzer.spectrum(w);
            ChannelSignature::from_spectrum(std_dev(w), &spectrum, band)
        })
        .collect()
}

pub(crate) fn pair_indices_from_signatures(
    a: &ChannelSignature,
    b: &ChannelSignature,
    cfg: &SimilarityConfig,
) -> PairIndices {
    let dcs = dcs_from_sigmas(a.sigma, b.sigma);
    let delta = DELTA_SCALE * a.max_magnitude.max(b.max_magnitude);
    let m = a.band_magnitude.len();
    debug_assert!(m > 0 && m == b.band_magnitude.len());
    let mut s_sum = 0.0;
    let mut a_sum = 0.0;
    for k in 0..m {
        s_sum += bin_magnitude_similarity(a.band_magnitude[k], b.band_magnitude[k], delta, cfg.lambda);
        a_sum += bin_phase_similarity(
            a.band_magnitude[k],
            b.band_magnitude[k],
            a.band_phase[k],
            b.band_phase[k],
            delta,
            cfg.epsilon,
        );
    }
    let fms = s_sum / m as f64;
    let fps = a_sum / m as f64;
    PairIndices {
        dynamic_change: dcs,
        freq_magnitude: fms,
        freq_phase: fps,
        similarity_degree: weighted_similarity(cfg, dcs, fms, fps),
    }
}

fn check_same_length(wi: &WindowView<'_>, wj: &WindowView<'_>) -> Result<()> {
    if wi.len() != wj.len() {
        return Err(Error::LengthMismatch {
            left: wi.len(),
            right: wj.len(),
        });
    }
    Ok(())
}

fn check_same_rate(wi: &WindowView<'_>, wj: &WindowView<'_>) -> Result<()> {
    if wi.sample_rate_hz() != wj.sample_rate_hz() {
        return Err(Error::SampleRateMismatch {
            left: wi.sample_rate_hz(),
            right: wj.sample_rate_hz(),
        });
    }
    Ok(())
}

/// All four similarity indices of one window pair.
pub fn pair_similarity(
    wi: &WindowView<'_>,
    wj: &WindowView<'_>,
    cfg: &SimilarityConfig,
) -> Result<PairIndices> {
    check_same_length(wi, wj)?;
    check_same_rate(wi, wj)?;
    cfg.validate_for_rate(wi.sample_rate_hz())?;
    let band = band_indices(&bin_freqs(wi.len(), wi.sample_rate_hz()), cfg)?;
    let mut analyzer = SpectrumAnalyzer::new();
    let sig_i = ChannelSignature::from_spectrum(std_dev(wi), &analyzer.spectrum(wi), &band);
    let sig_j = ChannelSignature::from_spectrum(std_dev(wj), &analyzer.spectrum(wj), &band);
    Ok(pair_indices_from_signatures(&sig_i, &sig_j, cfg))
}

pub(crate) fn degrees_from_signatures(
    signatures: &[ChannelSignature],
    cfg: &SimilarityConfig,
) -> Vec<f64> {
    let n = signatures.len();
    let mut sums = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let pair = pair_indices_from_signatures(&signatures[i], &signatures[j], cfg);
            sums[i] += pair.similarity_degree;
            sums[j] += pair.similarity_degree;
        }
    }
    let peers = (n - 1) as f64;
    sums.iter_mut().for_each(|s| *s /= peers);
    sums
}

fn check_window_set(windows: &[WindowView<'_>]) -> Result<()> {
    if windows.len() < 2 {
        return Err(Error::TooFewChannels {
            required: 2,
            got: windows.len(),
        });
    }
    for w in &windows[1..] {
        check_same_length(&windows[0], w)?;
        check_same_rate(&windows[0], w)?;
    }
    Ok(())
}

/// Similarity degree of every channel against its peers at one window
/// position: for channel `i`, the mean pair similarity degree over all
/// `j != i`.
pub fn similarity_degrees(
    windows: &[WindowView<'_>],
    cfg: &SimilarityConfig,
) -> Result<Vec<f64>> {
    check_window_set(windows)?;
    cfg.validate_for_rate(windows[0].sample_rate_hz())?;
    let band = band_indices(
        &bin_freqs(windows[0].len(), windows[0].sample_rate_hz()),
        cfg,
    )?;
    let mut analyzer = SpectrumAnalyzer::new();
    let signatures = channel_signatures(windows, &mut analyzer, &band);
    Ok(degrees_from_signatures(&signatures, cfg))
}

/// Similarity degree of channel `index` alone.
pub fn similarity_degree(
    windows: &[WindowView<'_>],
    index: usize,
    cfg: &SimilarityConfig,
) -> Result<f64> {
    if index >= windows.len() {
        return Err(Error::ChannelOutOfRange {
            index,
            n_channels: windows.len(),
        });
    }
    Ok(similarity_degrees(windows, cfg)?[index])
}
