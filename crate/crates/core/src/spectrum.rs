//! Single-sided spectra of raw sample windows.
//!
//! The transform is applied to the samples as they are: no detrending and
//! no taper, so equal windows produce equal spectra and leakage affects
//! every channel identically.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::signal::WindowView;

/// Single-sided spectrum: bins `0..=L/2` of an `L`-sample window.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin frequencies in Hz, strictly increasing with spacing `rate / L`.
    pub freqs_hz: Vec<f64>,
    /// `|X(f)|` per bin, nonnegative.
    pub magnitude: Vec<f64>,
    /// Phase per bin in radians, wrapped to `(-pi, pi]`.
    pub phase: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs_hz.is_empty()
    }

    /// Frequency spacing between bins in Hz.
    pub fn resolution_hz(&self) -> f64 {
        if self.freqs_hz.len() >= 2 {
            self.freqs_hz[1] - self.freqs_hz[0]
        } else {
            0.0
        }
    }
}

/// Wraps an angle to `(-pi, pi]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let mut a = x % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

/// Maps `atan2` output from `[-pi, pi]` to `(-pi, pi]`.
fn phase_of(c: Complex<f64>) -> f64 {
    let p = c.im.atan2(c.re);
    if p <= -PI {
        p + TAU
    } else {
        p
    }
}

/// Single-sided DFT of a window.
///
/// One-shot convenience; bulk callers should hold a [`SpectrumAnalyzer`]
/// to reuse the transform plan across windows of one length.
pub fn spectrum(window: &WindowView<'_>) -> Spectrum {
    SpectrumAnalyzer::new().spectrum(window)
}

/// Computes spectra while caching FFT plans per window length.
pub struct SpectrumAnalyzer {
    planner: FftPlanner<f64>,
    plan_len: usize,
    plan: Option<Arc<dyn Fft<f64>>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl SpectrumAnalyzer {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
            plan_len: 0,
            plan: None,
            buffer: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn plan_for(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        if self.plan_len != len || self.plan.is_none() {
            let plan = self.planner.plan_fft_forward(len);
            self.scratch
                .resize(plan.get_inplace_scratch_len(), Complex::default());
            self.plan_len = len;
            self.plan = Some(plan);
        }
        self.plan.as_ref().unwrap().clone()
    }

    /// Forward transform into `buffer`, leaving raw complex bins there.
    pub(crate) fn transform(&mut self, samples: &[f64]) -> &[Complex<f64>] {
        let plan = self.plan_for(samples.len());
        self.buffer.clear();
        self.buffer
            .extend(samples.iter().map(|&x| Complex::new(x, 0.0)));
        plan.process_with_scratch(&mut self.buffer, &mut self.scratch);
        &self.buffer
    }

    pub fn spectrum(&mut self, window: &WindowView<'_>) -> Spectrum {
        let len = window.len();
        let rate = window.sample_rate_hz();
        let bins = len / 2 + 1;
        let spectrum_bins = self.transform(window.samples())[..bins].to_vec();

        let mut freqs_hz = Vec::with_capacity(bins);
        let mut magnitude = Vec::with_capacity(bins);
        let mut phase = Vec::with_capacity(bins);
        for (k, c) in spectrum_bins.iter().enumerate() {
            freqs_hz.push(k as f64 * rate / len as f64);
            magnitude.push(c.norm());
            phase.push(phase_of(*c));
        }
        Spectrum {
            freqs_hz,
            magnitude,
            phase,
        }
    }
}

impl Default for SpectrumAnalyzer {
    fn default() -> Self {
        Self::new()
    }
}
