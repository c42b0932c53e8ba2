//! Multi-channel signal container and window views.
//!
//! A [`SignalMatrix`] holds N synchronized channels sampled at a uniform
//! rate; a [`WindowView`] borrows one fixed-length segment of one channel.
//! All kernel operations consume validated windows, so non-finite values
//! and degenerate lengths are rejected at construction time.

use crate::error::{Error, Result};

/// N synchronized channels of equal length at a uniform sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    channel_ids: Vec<String>,
    samples: Vec<Vec<f64>>,
    sample_rate_hz: f64,
}

impl SignalMatrix {
    /// Validates uniform channel lengths, a positive sample rate and
    /// all-finite samples.
    pub fn new(
        channel_ids: Vec<String>,
        samples: Vec<Vec<f64>>,
        sample_rate_hz: f64,
    ) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        if channel_ids.len() != samples.len() {
            return Err(Error::InvalidConfig(format!(
                "{} channel ids for {} channels",
                channel_ids.len(),
                samples.len()
            )));
        }
        let expected = samples.first().map_or(0, Vec::len);
        for (id, chan) in channel_ids.iter().zip(&samples) {
            if chan.len() != expected {
                return Err(Error::RaggedChannels {
                    channel: id.clone(),
                    expected,
                    got: chan.len(),
                });
            }
            if let Some(index) = chan.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteSample {
                    channel: id.clone(),
                    index,
                });
            }
        }
        Ok(Self {
            channel_ids,
            samples,
            sample_rate_hz,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.samples.len()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn channel_ids(&self) -> &[String] {
        &self.channel_ids
    }

    pub fn channel(&self, index: usize) -> Result<&[f64]> {
        self.samples
            .get(index)
            .map(Vec::as_slice)
            .ok_or(Error::ChannelOutOfRange {
                index,
                n_channels: self.n_channels(),
            })
    }

    /// Mutable access for injection; the caller must keep samples finite.
    pub(crate) fn channel_mut(&mut self, index: usize) -> &mut Vec<f64> {
        &mut self.samples[index]
    }

    /// One window of one channel. Bounds are checked; sample validity was
    /// established at construction.
    pub fn window(&self, channel: usize, start: usize, len: usize) -> Result<WindowView<'_>> {
        let chan = self.channel(channel)?;
        let end = start
            .checked_add(len)
            .filter(|&e| e <= chan.len())
            .ok_or(Error::WindowOutOfRange {
                start,
                end: start.saturating_add(len),
                len: chan.len(),
            })?;
        if len < 2 {
            return Err(Error::WindowTooShort {
                required: 2,
                got: len,
            });
        }
        Ok(WindowView {
            samples: &chan[start..end],
            sample_rate_hz: self.sample_rate_hz,
            channel_id: &self.channel_ids[channel],
        })
    }

    /// The same window position across every channel.
    pub fn windows_at(&self, start: usize, len: usize) -> Result<Vec<WindowView<'_>>> {
        (0..self.n_channels())
            .map(|c| self.window(c, start, len))
            .collect()
    }

    /// Reorders channels; used by the permutation-equivariance tests.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_channels() {
            return Err(Error::InvalidConfig(format!(
                "permutation of length {} for {} channels",
                order.len(),
                self.n_channels()
            )));
        }
        let mut ids = Vec::with_capacity(order.len());
        let mut samples = Vec::with_capacity(order.len());
        for &c in order {
            ids.push(
                self.channel_ids
                    .get(c)
                    .ok_or(Error::ChannelOutOfRange {
                        index: c,
                        n_channels: self.n_channels(),
                    })?
                    .clone(),
            );
            samples.push(self.samples[c].clone());
        }
        Self::new(ids, samples, self.sample_rate_hz)
    }
}

/// A borrowed, validated segment of one channel.
#[derive(Debug, Clone, Copy)]
pub struct WindowView<'a> {
    samples: &'a [f64],
    sample_rate_hz: f64,
    channel_id: &'a str,
}

impl<'a> WindowView<'a> {
    /// Requires at least two finite samples and a positive rate.
    pub fn new(samples: &'a [f64], sample_rate_hz: f64, channel_id: &'a str) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::WindowTooShort {
                required: 2,
                got: samples.len(),
            });
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                channel: channel_id.to_string(),
                index,
            });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            channel_id,
        })
    }

    pub fn samples(&self) -> &'a [f64] {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn channel_id(&self) -> &'a str {
        self.channel_id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_rejects_ragged_channels() {
        let err = SignalMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0], vec![1.0]],
            60.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RaggedChannels { .. }));
    }

    #[test]
    fn matrix_rejects_nan() {
        let err = SignalMatrix::new(
            vec!["a".into()],
            vec![vec![1.0, f64::NAN]],
            60.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 1, .. }));
    }

    #[test]
    fn window_bounds_checked() {
        let m = SignalMatrix::new(vec!["a".into()], vec![vec![0.0; 10]], 60.0).unwrap();
        assert!(m.window(0, 4, 6).is_ok());
        assert!(matches!(
            m.window(0, 5, 6).unwrap_err(),
            Error::WindowOutOfRange { .. }
        ));
        assert!(matches!(
            m.window(0, 0, 1).unwrap_err(),
            Error::WindowTooShort { .. }
        ));
    }

    #[test]
    fn window_view_rejects_short_and_nonfinite() {
        assert!(matches!(
            WindowView::new(&[1.0], 60.0, "x").unwrap_err(),
            Error::WindowTooShort { .. }
        ));
        assert!(matches!(
            WindowView::new(&[1.0, f64::INFINITY], 60.0, "x").unwrap_err(),
            Error::NonFiniteSample { .. }
        ));
        assert!(matches!(
            WindowView::new(&[1.0, 2.0], 0.0, "x").unwrap_err(),
            Error::InvalidSampleRate(_)
        ));
    }
}
