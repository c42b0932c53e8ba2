//! Density-based Local Outlier Factor baseline.
//!
//! The comparison method scores each channel by the LOF of its per-window
//! standard deviation among the other channels' features: k-distance
//! neighborhoods with tie inclusion, reachability distances, local
//! reachability density, and the mean density ratio. Inliers score near 1.
//! The same sliding/confirmation machinery as the similarity detector
//! turns per-window scores into flags, with a channel a candidate iff its
//! score strictly exceeds the threshold.

use serde::{Deserialize, Serialize};

use crate::detector::{run_sliding, SlidingParams};
use crate::error::{Error, Result};
use crate::report::DetectionReport;
use crate::signal::{SignalMatrix, WindowView};
use crate::similarity::{sigma_of, std_dev};

/// Distances below this floor are clamped so densities stay finite when
/// features coincide.
const MIN_DISTANCE: f64 = 1e-15;

/// LOF baseline parameters. Defaults: 3 neighbors, threshold 10, and the
/// detector's sliding parameters (80-sample windows, stride 1, 15
/// confirmations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LofConfig {
    pub k_neighbors: usize,
    /// A channel is a candidate iff its score strictly exceeds this.
    pub threshold: f64,
    pub window_len: usize,
    pub stride: usize,
    pub confirm_windows: usize,
}

impl Default for LofConfig {
    fn default() -> Self {
        Self {
            k_neighbors: 3,
            threshold: 10.0,
            window_len: 80,
            stride: 1,
            confirm_windows: 15,
        }
    }
}

impl LofConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors < 2 {
            return Err(Error::InvalidConfig(format!(
                "k_neighbors must be at least 2, got {}",
                self.k_neighbors
            )));
        }
        if !(self.threshold.is_finite() && self.threshold > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "LOF threshold must exceed 1, got {}",
                self.threshold
            )));
        }
        if self.window_len < 2 {
            return Err(Error::InvalidConfig(format!(
                "window_len must be at least 2, got {}",
                self.window_len
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-window feature the baseline operates on: the window standard
/// deviation, a low-variance time-domain dispersion measure.
pub fn lof_feature(window: &WindowView<'_>) -> f64 {
    std_dev(window)
}

/// LOF score of every feature among its peers.
///
/// Needs `k_neighbors + 1 <= N`. If all features coincide every distance
/// sits at the clamp floor and every score comes out exactly 1.
pub fn lof_scores(features: &[f64], cfg: &LofConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = features.len();
    let k = cfg.k_neighbors;
    if n < k + 1 {
        return Err(Error::TooFewChannels {
            required: k + 1,
            got: n,
        });
    }

    let dist = |i: usize, j: usize| (features[i] - features[j]).abs().max(MIN_DISTANCE);

    // k-distance and tie-inclusive neighborhood per point.
    let mut k_distances = Vec::with_capacity(n);
    let mut neighborhoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut distances: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(i, j)).collect();
        distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k_dist = distances[k - 1];
        k_distances.push(k_dist);
        neighborhoods.push((0..n).filter(|&j| j != i && dist(i, j) <= k_dist).collect());
    }

    // Local reachability density: inverse mean reachability distance to
    // the neighborhood.
    let mut lrd = vec![0.0; n];
    for i in 0..n {
        let reach_sum: f64 = neighborhoods[i]
            .iter()
            .map(|&j| k_distances[j].max(dist(i, j)))
            .sum();
        lrd[i] = neighborhoods[i].len() as f64 / reach_sum;
    }

    Ok((0..n)
        .map(|i| {
            let ratio_sum: f64 = neighborhoods[i].iter().map(|&j| lrd[j]).sum();
            ratio_sum / (neighborhoods[i].len() as f64 * lrd[i])
        })
        .collect())
}

/// Runs the LOF baseline over the whole matrix with the same sliding and
/// confirmation rules as the similarity detector.
pub fn run_lof(matrix: &SignalMatrix, cfg: &LofConfig) -> Result<DetectionReport> {
    cfg.validate()?;
    if matrix.n_channels() < cfg.k_neighbors + 1 {
        return Err(Error::TooFewChannels {
            required: cfg.k_neighbors + 1,
            got: matrix.n_channels(),
        });
    }
    let params = SlidingParams {
        window_len: cfg.window_len,
        stride: cfg.stride,
        confirm_windows: cfg.confirm_windows,
        flag_preceding_run: false,
    };
    run_sliding(matrix, &params, |start| {
        let features: Vec<f64> = (0..matrix.n_channels())
            .map(|c| {
                matrix
                    .channel(c)
                    .map(|chan| sigma_of(&chan[start..start + cfg.window_len]))
            })
            .collect::<Result<_>>()?;
        let scores = lof_scores(&features, cfg)?;
        Ok(scores
            .into_iter()
            .map(|s| (s, s > cfg.threshold))
            .collect())
    })
}
