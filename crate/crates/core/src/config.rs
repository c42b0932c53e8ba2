//! Similarity kernel configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the weight-sum constraint `w_dcs + w_fms + w_fps = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Parameters of the pairwise similarity indices.
///
/// Defaults: `lambda` 10, `epsilon` 0.5, weights (0.3, 0.35, 0.35),
/// analysis band (0, 5] Hz with the DC bin excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    /// Magnitude-distance sensitivity (larger is more tolerant).
    pub lambda: f64,
    /// Phase-distance sensitivity (larger is more tolerant).
    pub epsilon: f64,
    /// Weight of the dynamic-change (standard-deviation ratio) index.
    pub w_dcs: f64,
    /// Weight of the frequency-magnitude index.
    pub w_fms: f64,
    /// Weight of the frequency-phase index.
    pub w_fps: f64,
    /// Lower edge of the analysis band in Hz.
    pub band_low_hz: f64,
    /// Upper edge of the analysis band in Hz.
    pub band_high_hz: f64,
    /// Retain the bin at `band_low_hz` itself (the DC bin when the band
    /// starts at zero). Off by default: the DC bin carries the operating
    /// point common to every channel and masks in-band differences.
    pub include_dc: bool,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            lambda: 10.0,
            epsilon: 0.5,
            w_dcs: 0.3,
            w_fms: 0.35,
            w_fps: 0.35,
            band_low_hz: 0.0,
            band_high_hz: 5.0,
            include_dc: false,
        }
    }
}

impl SimilarityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        for (name, w) in [
            ("w_dcs", self.w_dcs),
            ("w_fms", self.w_fms),
            ("w_fps", self.w_fps),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be nonnegative, got {w}"
                )));
            }
        }
        let sum = self.w_dcs + self.w_fms + self.w_fps;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOLERANCE:e}, got {sum}"
            )));
        }
        if !(self.band_low_hz.is_finite()
            && self.band_high_hz.is_finite()
            && self.band_low_hz >= 0.0
            && self.band_low_hz < self.band_high_hz)
        {
            return Err(Error::InvalidConfig(format!(
                "band must satisfy 0 <= low < high, got ({}, {}]",
                self.band_low_hz, self.band_high_hz
            )));
        }
        Ok(())
    }

    /// Checks the band against the Nyquist limit of an actual signal.
    pub fn validate_for_rate(&self, sample_rate_hz: f64) -> Result<()> {
        self.validate()?;
        let nyquist = sample_rate_hz / 2.0;
        if self.band_high_hz > nyquist {
            return Err(Error::InvalidConfig(format!(
                "band upper edge {} Hz exceeds Nyquist {} Hz",
                self.band_high_hz, nyquist
            )));
        }
        Ok(())
    }
}
