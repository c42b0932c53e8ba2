//! Detection output shared by the similarity detector and the LOF
//! baseline.

use serde::{Deserialize, Serialize};

/// Scores of every channel at one window position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowTrace {
    /// Start sample index of the window.
    pub start: usize,
    /// Per-channel score at this position (similarity degree for the
    /// proposed detector, LOF score for the baseline).
    pub scores: Vec<f64>,
}

/// Per-channel low-quality flags with the diagnostic trace that produced
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub channel_ids: Vec<String>,
    /// Per-channel boolean mask over sample indices.
    pub flags: Vec<Vec<bool>>,
    /// Score trace per evaluated window position.
    pub trace: Vec<WindowTrace>,
    /// Start indices of the windows that confirmed, per channel.
    pub confirmed_windows: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

impl DetectionReport {
    pub fn n_channels(&self) -> usize {
        self.channel_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.flags.first().map_or(0, Vec::len)
    }

    pub fn flagged_count(&self, channel: usize) -> usize {
        self.flags[channel].iter().filter(|&&f| f).count()
    }

    pub fn any_flagged(&self) -> bool {
        self.flags.iter().any(|c| c.iter().any(|&f| f))
    }

    /// Contiguous flagged runs of one channel as `[start, end)` pairs.
    pub fn flagged_intervals(&self, channel: usize) -> Vec<(usize, usize)> {
        let mut intervals = Vec::new();
        let mut run_start = None;
        for (i, &f) in self.flags[channel].iter().enumerate() {
            match (f, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    intervals.push((s, i));
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = run_start {
            intervals.push((s, self.flags[channel].len()));
        }
        intervals
    }

    /// Reorders channels; `order[k]` names the source channel that becomes
    /// channel `k`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            channel_ids: order.iter().map(|&c| self.channel_ids[c].clone()).collect(),
            flags: order.iter().map(|&c| self.flags[c].clone()).collect(),
            trace: self
                .trace
                .iter()
                .map(|t| WindowTrace {
                    start: t.start,
                    scores: order.iter().map(|&c| t.scores[c]).collect(),
                })
                .collect(),
            confirmed_windows: order
                .iter()
                .map(|&c| self.confirmed_windows[c].clone())
                .collect(),
            warnings: self.warnings.clone(),
        }
    }
}
