//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values.
//!
//! Run with: cargo test -p simdeg-core --test acceptance -- --nocapture

mod common;

use std::sync::Mutex;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use simdeg_core::{
    equal_sigma_pair, generate, inject, magnitude_distance_profile, monte_carlo_compare,
    pair_similarity, phase_distance_profile, run_stream, spectrum, AnomalyKind, AnomalySpec,
    CompareConfig, DetectionReport, DetectorConfig, FdiShape, LabelMask, LofConfig, Magnitude,
    ScenarioSpec, SimilarityConfig, Spectrum, StreamDetector, WindowView,
};

// The suite is serialized so the throughput measurement and the
// Monte-Carlo runs do not contend for cores.
static SUITE: Mutex<()> = Mutex::new(());

fn suite_lock() -> std::sync::MutexGuard<'static, ()> {
    SUITE.lock().unwrap_or_else(|e| e.into_inner())
}

fn flat_spectrum(freqs: &[f64], mag: f64, phase: f64) -> Spectrum {
    Spectrum {
        freqs_hz: freqs.to_vec(),
        magnitude: vec![mag; freqs.len()],
        phase: vec![phase; freqs.len()],
    }
}

#[test]
fn c1_closed_form_kernel_values() {
    let _guard = suite_lock();
    let cfg = SimilarityConfig::default();

    // Sigma ratio 2 -> e^(-1).
    let a = [0.0, 2.0];
    let b = [0.0, 4.0];
    let wa = WindowView::new(&a, 60.0, "a").unwrap();
    let wb = WindowView::new(&b, 60.0, "b").unwrap();
    let dcs = simdeg_core::dynamic_change_similarity(&wa, &wb).unwrap();
    let want_dcs = (-1.0f64).exp();
    assert!((dcs - want_dcs).abs() < 1e-12, "{dcs} vs {want_dcs}");

    // Magnitude ratio 10 at lambda 10 -> 1 - tanh(2).
    let freqs = [0.0, 1.0, 2.0];
    let si = flat_spectrum(&freqs, 1.0, 0.0);
    let sj = flat_spectrum(&freqs, 10.0, 0.0);
    let want_s = 1.0 - 2.0f64.tanh();
    for (_, s) in magnitude_distance_profile(&si, &sj, &cfg).unwrap() {
        assert!((s - want_s).abs() < 1e-12, "{s} vs {want_s}");
    }

    // Phase distance pi at epsilon 0.5 -> 1 - tanh(1).
    let sk = flat_spectrum(&freqs, 1.0, std::f64::consts::PI);
    let want_a = 1.0 - 1.0f64.tanh();
    for (_, a) in phase_distance_profile(&si, &sk, &cfg).unwrap() {
        assert!((a - want_a).abs() < 1e-12, "{a} vs {want_a}");
    }

    println!(
        "acceptance C1 closed-form kernel values: PASS \
         (e^-1 {want_dcs:.12}, 1-tanh(2) {want_s:.12}, 1-tanh(1) {want_a:.12})"
    );
}

#[test]
fn c2_dft_matches_naive_oracle() {
    let _guard = suite_lock();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let samples: Vec<f64> = (0..80)
            .map(|_| 60.0 + rng.random_range(-0.5..0.5))
            .collect();
        let w = WindowView::new(&samples, 60.0, "r").unwrap();
        let got = spectrum(&w);
        let oracle = common::naive_dft(&samples);
        for (k, &(mag, phase)) in oracle.iter().enumerate() {
            worst = worst.max((got.magnitude[k] - mag).abs());
            worst = worst.max(common::oracle_wrap(got.phase[k] - phase).abs());
        }
    }
    assert!(worst < 1e-9, "max abs error {worst}");
    println!(
        "acceptance C2 DFT vs naive oracle (200 windows): PASS \
         (max abs error {worst:.3e}, {:.2} s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn c3_equal_sigma_pair_discriminability() {
    let _guard = suite_lock();
    let (a, b) = equal_sigma_pair();
    let sa = common::oracle_sigma(&a);
    let sb = common::oracle_sigma(&b);
    let rel = (sa / sb - 1.0).abs();
    assert!(rel < 1e-4, "sigma mismatch {rel}");

    let wa = WindowView::new(&a, 60.0, "one").unwrap();
    let wb = WindowView::new(&b, 60.0, "two").unwrap();
    let pair = pair_similarity(&wa, &wb, &SimilarityConfig::default()).unwrap();
    assert!(pair.dynamic_change > 0.999, "dcs {}", pair.dynamic_change);
    let spectral_min = pair.freq_magnitude.min(pair.freq_phase);
    assert!(spectral_min < 0.7, "spectral min {spectral_min}");
    assert!(pair.freq_phase < 0.85, "fps {}", pair.freq_phase);
    println!(
        "acceptance C3 equal-sigma discriminability: PASS \
         (sigma rel diff {rel:.2e}, dcs {:.4}, fms {:.4}, fps {:.4})",
        pair.dynamic_change, pair.freq_magnitude, pair.freq_phase
    );
}

#[test]
fn c4_clean_event_data_never_flags() {
    let _guard = suite_lock();
    let started = Instant::now();
    let cfg = DetectorConfig::default();
    let mut min_degree = f64::INFINITY;
    for seed in 0..20u64 {
        let (matrix, _) = generate(&ScenarioSpec::with_event(20, 30.0, seed)).unwrap();
        let report = run_stream(&matrix, &cfg).unwrap();
        for t in &report.trace {
            for &s in &t.scores {
                min_degree = min_degree.min(s);
            }
        }
        assert!(
            !report.any_flagged(),
            "seed {seed} flagged clean event data"
        );
    }
    println!(
        "acceptance C4 clean event data, 20 seeds: PASS \
         (zero flags, min similarity degree {min_degree:.3}, {:.1} s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn c5_spike_and_repeated_channel_flagged() {
    let _guard = suite_lock();
    let started = Instant::now();
    let bad = 9usize;
    let (mut matrix, _) = generate(&ScenarioSpec::normal(22, 60.0, 505)).unwrap();
    let mut labels = LabelMask::new(22, matrix.n_samples());
    inject(
        &mut matrix,
        &mut labels,
        &AnomalySpec {
            kind: AnomalyKind::Spike { count: 8 },
            channels: vec![bad],
            start: 400,
            length: 2200,
            magnitude: Magnitude::SigmaRange { lo: 50.0, hi: 100.0 },
            seed: 42,
        },
    )
    .unwrap();
    inject(
        &mut matrix,
        &mut labels,
        &AnomalySpec {
            kind: AnomalyKind::Repeated,
            channels: vec![bad],
            start: 2800,
            length: 300,
            magnitude: Magnitude::Fixed(0.0),
            seed: 43,
        },
    )
    .unwrap();

    let report = run_stream(&matrix, &DetectorConfig::default()).unwrap();
    let mut injected = 0usize;
    let mut covered = 0usize;
    for i in 0..matrix.n_samples() {
        if labels.is_labeled(bad, i) {
            injected += 1;
            if report.flags[bad][i] {
                covered += 1;
            }
        }
    }
    let coverage = covered as f64 / injected as f64;
    assert!(
        coverage >= 0.9,
        "only {covered}/{injected} injected samples flagged"
    );
    for ch in (0..22).filter(|&c| c != bad) {
        assert_eq!(
            report.flagged_count(ch),
            0,
            "clean channel {ch} was flagged"
        );
    }
    println!(
        "acceptance C5 spikes + repeated data on one of 22 channels: PASS \
         (coverage {:.1}% of {injected} injected samples, other channels clean, {:.1} s)",
        100.0 * coverage,
        started.elapsed().as_secs_f64()
    );
}

fn fdi_compare(seed: u64, lo: f64, hi: f64) -> simdeg_core::CompareSummary {
    let cfg = CompareConfig {
        scenario: ScenarioSpec::with_event(20, 30.0, seed),
        anomaly: AnomalySpec {
            kind: AnomalyKind::Fdi {
                shape: FdiShape::Bias,
            },
            channels: vec![0, 1, 2, 3],
            start: 1200,
            length: 10,
            magnitude: Magnitude::SigmaRange { lo, hi },
            seed: 0,
        },
        trials: 100,
        detector: DetectorConfig::default(),
        lof: LofConfig::default(),
    };
    monte_carlo_compare(&cfg).unwrap()
}

#[test]
fn c6_fdi_monte_carlo_ordering() {
    let _guard = suite_lock();
    let started = Instant::now();

    // Ordering at the unobvious magnitude range spanning the detection
    // boundary.
    let unobvious = match Magnitude::unobvious() {
        Magnitude::SigmaRange { lo, hi } => (lo, hi),
        other => panic!("unexpected default magnitude {other:?}"),
    };
    let ordering = fdi_compare(601, unobvious.0, unobvious.1);
    let margin = ordering.proposed_mean - ordering.lof_mean;
    assert!(
        margin >= 1.0,
        "ordering margin {margin} (proposed {}, lof {})",
        ordering.proposed_mean,
        ordering.lof_mean
    );

    // Reliable identification well above the boundary (all magnitudes
    // at least 3 reference sigmas).
    let strong = fdi_compare(801, 10.0, 100.0);
    assert!(
        strong.proposed_mean >= 3.0,
        "proposed mean {} below 3.0 at strong magnitudes",
        strong.proposed_mean
    );

    println!("acceptance C6 FDI Monte-Carlo (100 trials each): PASS");
    println!("  mean identified signals, unobvious magnitudes [{}, {}] sigma:", unobvious.0, unobvious.1);
    println!("    proposed approach  {:.2}", ordering.proposed_mean);
    println!("    LOF baseline       {:.2}", ordering.lof_mean);
    println!(
        "  strong magnitudes [10, 100] sigma: proposed {:.2}, LOF {:.2}  ({:.1} s)",
        strong.proposed_mean,
        strong.lof_mean,
        started.elapsed().as_secs_f64()
    );
}

fn spiked_fixture(n_channels: usize, seed: u64) -> simdeg_core::SignalMatrix {
    let bad = 2usize;
    let (mut matrix, _) = generate(&ScenarioSpec::normal(n_channels, 20.0, seed)).unwrap();
    let mut labels = LabelMask::new(n_channels, matrix.n_samples());
    inject(
        &mut matrix,
        &mut labels,
        &AnomalySpec {
            kind: AnomalyKind::Spike { count: 4 },
            channels: vec![bad],
            start: 200,
            length: 500,
            magnitude: Magnitude::SigmaRange { lo: 60.0, hi: 90.0 },
            seed: seed ^ 0xabc,
        },
    )
    .unwrap();
    inject(
        &mut matrix,
        &mut labels,
        &AnomalySpec {
            kind: AnomalyKind::Repeated,
            channels: vec![bad],
            start: 800,
            length: 200,
            magnitude: Magnitude::Fixed(0.0),
            seed: seed ^ 0xdef,
        },
    )
    .unwrap();
    matrix
}

fn assert_flag_subset(inner: &DetectionReport, outer: &DetectionReport) {
    for (ch, (a, b)) in inner.flags.iter().zip(&outer.flags).enumerate() {
        for (i, (&fa, &fb)) in a.iter().zip(b).enumerate() {
            assert!(!fa || fb, "channel {ch} sample {i} flagged only in inner run");
        }
    }
}

#[test]
fn c7_detector_property_suite() {
    let _guard = suite_lock();
    let started = Instant::now();

    // Online/offline equivalence over 50 random batch partitions.
    let matrix = spiked_fixture(4, 707);
    let cfg = DetectorConfig::default();
    let offline = run_stream(&matrix, &cfg).unwrap();
    assert!(offline.any_flagged(), "fixture should produce flags");
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    for round in 0..50 {
        let mut stream = StreamDetector::new(matrix.channel_ids().to_vec(), cfg.clone()).unwrap();
        let mut consumed = 0usize;
        while consumed < matrix.n_samples() {
            let size = rng
                .random_range(0..=37usize)
                .min(matrix.n_samples() - consumed);
            let batch: Vec<&[f64]> = (0..matrix.n_channels())
                .map(|c| &matrix.channel(c).unwrap()[consumed..consumed + size])
                .collect();
            stream.push_samples(&batch).unwrap();
            consumed += size;
        }
        assert_eq!(stream.report(), offline, "partition round {round} differs");
    }

    // Threshold monotonicity: lowering zeta can only remove flags.
    let mono = spiked_fixture(6, 909);
    let runs: Vec<DetectionReport> = [0.2, 0.3, 0.45]
        .iter()
        .map(|&zeta| {
            run_stream(
                &mono,
                &DetectorConfig {
                    zeta,
                    ..Default::default()
                },
            )
            .unwrap()
        })
        .collect();
    assert_flag_subset(&runs[0], &runs[1]);
    assert_flag_subset(&runs[1], &runs[2]);

    // Confirmation monotonicity: more required confirmations can only
    // remove flags.
    let confirm_runs: Vec<DetectionReport> = [25usize, 15, 5]
        .iter()
        .map(|&confirm_windows| {
            run_stream(
                &mono,
                &DetectorConfig {
                    confirm_windows,
                    ..Default::default()
                },
            )
            .unwrap()
        })
        .collect();
    assert_flag_subset(&confirm_runs[0], &confirm_runs[1]);
    assert_flag_subset(&confirm_runs[1], &confirm_runs[2]);

    // Channel-permutation equivariance.
    let order = [3usize, 0, 5, 1, 4, 2];
    let permuted = mono.permuted(&order).unwrap();
    let base = run_stream(&mono, &DetectorConfig::default()).unwrap();
    let perm_run = run_stream(&permuted, &DetectorConfig::default()).unwrap();
    let base_perm = base.permuted(&order);
    assert_eq!(perm_run.flags, base_perm.flags);
    assert_eq!(perm_run.confirmed_windows, base_perm.confirmed_windows);
    assert_eq!(perm_run.channel_ids, base_perm.channel_ids);
    for (a, b) in perm_run.trace.iter().zip(&base_perm.trace) {
        assert_eq!(a.start, b.start);
        for (x, y) in a.scores.iter().zip(&b.scores) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    println!(
        "acceptance C7 detector properties (equivalence, monotonicity, permutation): PASS ({:.1} s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn c8_lof_small_instance_oracle() {
    let _guard = suite_lock();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for n in 4..=6usize {
        for k in 2..n {
            for round in 0..40 {
                let mut features: Vec<f64> =
                    (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
                // Exercise ties with occasional exact duplicates.
                if round % 4 == 0 {
                    features[1] = features[0];
                }
                let cfg = LofConfig {
                    k_neighbors: k,
                    ..Default::default()
                };
                let got = simdeg_core::lof_scores(&features, &cfg).unwrap();
                let want = common::brute_lof(&features, k, 1e-15);
                for (g, w) in got.iter().zip(&want) {
                    let err = (g - w).abs() / w.abs().max(1.0);
                    worst = worst.max(err);
                    assert!(err < 1e-9, "{g} vs {w} (n={n}, k={k})");
                }
                checked += 1;
            }
        }
    }
    // The degenerate hand cases.
    let cfg = LofConfig {
        k_neighbors: 2,
        ..Default::default()
    };
    let got = simdeg_core::lof_scores(&[0.0, 0.0, 0.0, 1.0], &cfg).unwrap();
    let want = common::brute_lof(&[0.0, 0.0, 0.0, 1.0], 2, 1e-15);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() / w.abs().max(1.0) < 1e-9);
    }
    println!(
        "acceptance C8 LOF vs from-definition brute force: PASS \
         ({checked} instances, worst relative error {worst:.3e})"
    );
}

#[test]
fn c9_throughput_realtime_factor() {
    let _guard = suite_lock();
    let (matrix, _) = generate(&ScenarioSpec::normal(22, 60.0, 9)).unwrap();
    let cfg = DetectorConfig::default();
    // Warm-up, then best of three.
    run_stream(&matrix, &cfg).unwrap();
    let mut best = f64::INFINITY;
    let mut positions = 0usize;
    for _ in 0..3 {
        let start = Instant::now();
        let report = run_stream(&matrix, &cfg).unwrap();
        best = best.min(start.elapsed().as_secs_f64());
        positions = report.trace.len();
    }
    let realtime_factor = 60.0 / best;
    let windows_per_s = positions as f64 / best;
    assert!(
        realtime_factor >= 100.0,
        "only {realtime_factor:.0}x realtime"
    );
    println!(
        "acceptance C9 throughput (22 channels, stride 1, 60 samples/s): PASS \
         ({windows_per_s:.0} windows/s, {realtime_factor:.0}x realtime)"
    );
}
