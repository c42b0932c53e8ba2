//! Independent straight-line oracles for the integration suites.
//!
//! Everything here recomputes results from first principles: compensated
//! summation for moments, an O(L^2) DFT, explicit per-bin similarity maps
//! and a definition-literal LOF. None of it shares code with the library
//! paths it checks.
//!
//! Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

pub fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Population standard deviation via compensated two-pass moments.
pub fn oracle_sigma(samples: &[f64]) -> f64 {
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mean = kahan_sum(samples.iter().cloned()) / n;
    let var = kahan_sum(samples.iter().map(|&x| (x - mean) * (x - mean))) / n;
    var.sqrt()
}

/// O(L^2) single-sided DFT: `(magnitude, phase)` for bins `0..=L/2`.
pub fn naive_dft(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    (0..n / 2 + 1)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (i, &x) in samples.iter().enumerate() {
                let angle = -TAU * k as f64 * i as f64 / n as f64;
                re += x * angle.cos();
                im += x * angle.sin();
            }
            ((re * re + im * im).sqrt(), im.atan2(re))
        })
        .collect()
}

pub fn oracle_wrap(x: f64) -> f64 {
    let mut a = x % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

/// Kernel parameters the oracle needs; mirrors the library defaults.
#[derive(Clone, Copy)]
pub struct OracleConfig {
    pub lambda: f64,
    pub epsilon: f64,
    pub w_dcs: f64,
    pub w_fms: f64,
    pub w_fps: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub include_dc: bool,
}

impl Default for OracleConfig {
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

/// All four pair indices recomputed from first principles, including the
/// documented degenerate-dispersion and empty-bin rules.
pub fn oracle_pair_indices(a: &[f64], b: &[f64], rate_hz: f64, cfg: &OracleConfig) -> [f64; 4] {
    assert_eq!(a.len(), b.len());
    let len = a.len();

    let sigma_a = oracle_sigma(a);
    let sigma_b = oracle_sigma(b);
    let dcs = if sigma_a == 0.0 && sigma_b == 0.0 {
        1.0
    } else if sigma_a == 0.0 || sigma_b == 0.0 {
        0.0
    } else {
        (1.0 - (sigma_a / sigma_b).max(sigma_b / sigma_a)).exp()
    };

    let spec_a = naive_dft(a);
    let spec_b = naive_dft(b);
    let mut band = Vec::new();
    for k in 0..len / 2 + 1 {
        let f = k as f64 * rate_hz / len as f64;
        let above_low = if cfg.include_dc {
            f >= cfg.band_low_hz
        } else {
            f > cfg.band_low_hz
        };
        if above_low && f <= cfg.band_high_hz {
            band.push(k);
        }
    }
    assert!(!band.is_empty(), "oracle band empty");

    let max_mag = spec_a
        .iter()
        .chain(&spec_b)
        .map(|&(m, _)| m)
        .fold(0.0, f64::max);
    let delta = 1e-12 * max_mag;

    let mut s_values = Vec::new();
    let mut a_values = Vec::new();
    for &k in &band {
        let (mag_a, phase_a) = spec_a[k];
        let (mag_b, phase_b) = spec_b[k];
        let empty_a = mag_a <= delta;
        let empty_b = mag_b <= delta;
        if empty_a && empty_b {
            s_values.push(1.0);
            a_values.push(1.0);
            continue;
        }
        let db = if empty_a != empty_b {
            300.0
        } else {
            (20.0 * (mag_b / mag_a).log10()).abs()
        };
        s_values.push(1.0 - (db / cfg.lambda).tanh());
        let phi = oracle_wrap(phase_b - phase_a).abs();
        a_values.push(1.0 - (phi / (TAU * cfg.epsilon)).tanh());
    }
    let m = band.len() as f64;
    let fms = kahan_sum(s_values.into_iter()) / m;
    let fps = kahan_sum(a_values.into_iter()) / m;
    let sd = cfg.w_dcs * dcs + cfg.w_fms * fms + cfg.w_fps * fps;
    [dcs, fms, fps, sd]
}

/// Similarity degree of channel `index` recomputed pair by pair.
pub fn oracle_similarity_degree(
    channels: &[Vec<f64>],
    index: usize,
    rate_hz: f64,
    cfg: &OracleConfig,
) -> f64 {
    let others: Vec<f64> = (0..channels.len())
        .filter(|&j| j != index)
        .map(|j| oracle_pair_indices(&channels[index], &channels[j], rate_hz, cfg)[3])
        .collect();
    kahan_sum(others.iter().cloned()) / others.len() as f64
}

/// Definition-literal LOF with the same distance clamp as the library:
/// the k-distance is found by scanning candidate radii rather than by
/// selection, and neighborhoods include ties.
pub fn brute_lof(features: &[f64], k: usize, min_distance: f64) -> Vec<f64> {
    let n = features.len();
    assert!(k >= 1 && k < n);
    let d = |i: usize, j: usize| (features[i] - features[j]).abs().max(min_distance);

    // k-distance(p): smallest candidate radius r among the distances from
    // p such that at least k points lie within r and at most k - 1 lie
    // strictly inside it.
    let k_distance = |p: usize| -> f64 {
        let mut best = f64::INFINITY;
        for o in (0..n).filter(|&o| o != p) {
            let r = d(p, o);
            let within = (0..n).filter(|&q| q != p && d(p, q) <= r).count();
            let strictly_inside = (0..n).filter(|&q| q != p && d(p, q) < r).count();
            if within >= k && strictly_inside < k && r < best {
                best = r;
            }
        }
        best
    };
    let k_dists: Vec<f64> = (0..n).map(k_distance).collect();
    let neighborhood = |p: usize| -> Vec<usize> {
        (0..n).filter(|&o| o != p && d(p, o) <= k_dists[p]).collect()
    };
    let lrd = |p: usize| -> f64 {
        let hood = neighborhood(p);
        let total: f64 = hood.iter().map(|&o| k_dists[o].max(d(p, o))).sum();
        hood.len() as f64 / total
    };
    let densities: Vec<f64> = (0..n).map(lrd).collect();
    (0..n)
        .map(|p| {
            let hood = neighborhood(p);
            let sum: f64 = hood.iter().map(|&o| densities[o]).sum();
            sum / (hood.len() as f64 * densities[p])
        })
        .collect()
}
