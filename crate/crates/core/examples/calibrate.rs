//! Calibration sweeps for detector and scenario parameters.
//!
//! Prints the clean-data similarity floor, detection rates versus
//! injection magnitude for both approaches, and detector throughput.
//! Useful when tuning `zeta`, the confirmation count, or scenario
//! parameters for a new deployment.
//!
//! Run with: cargo run --release --example calibrate

use std::time::Instant;

use simdeg_core::{
    generate, inject, monte_carlo_compare, run_stream, AnomalyKind, AnomalySpec, CompareConfig,
    DetectorConfig, FdiShape, LabelMask, LofConfig, Magnitude, ScenarioSpec,
};

fn clean_floor(label: &str, spec_for: impl Fn(u64) -> ScenarioSpec, seeds: u64) {
    let cfg = DetectorConfig::default();
    let mut min_sd = f64::INFINITY;
    let mut flagged = 0usize;
    for seed in 0..seeds {
        let (matrix, _) = generate(&spec_for(seed)).unwrap();
        let report = run_stream(&matrix, &cfg).unwrap();
        for t in &report.trace {
            for &s in &t.scores {
                min_sd = min_sd.min(s);
            }
        }
        flagged += report
            .flags
            .iter()
            .map(|c| c.iter().filter(|&&f| f).count())
            .sum::<usize>();
    }
    println!("{label}: min similarity degree {min_sd:.4}, flagged samples {flagged}");
}

fn fdi_sweep() {
    println!("\nFDI sweep: 20 channels, 10-sample bias in 4 channels, 30 s");
    println!("{:>10} {:>12} {:>12}", "magnitude", "proposed", "lof");
    for &(lo, hi) in &[
        (1.0, 1.0),
        (2.0, 2.0),
        (3.0, 3.0),
        (4.0, 4.0),
        (5.0, 5.0),
        (6.0, 6.0),
        (7.0, 7.0),
        (8.0, 8.0),
        (9.0, 9.0),
        (10.0, 10.0),
        (12.0, 12.0),
        (14.0, 14.0),
        (16.0, 16.0),
        (20.0, 20.0),
        (3.0, 9.0),
        (4.0, 12.0),
        (6.0, 16.0),
        (8.0, 16.0),
        (10.0, 20.0),
    ] {
        let cfg = CompareConfig {
            scenario: ScenarioSpec::with_event(20, 30.0, 1000),
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
            trials: 40,
            detector: DetectorConfig::default(),
            lof: LofConfig::default(),
        };
        let summary = monte_carlo_compare(&cfg).unwrap();
        println!(
            "{:>10} {:>12.2} {:>12.2}",
            format!("[{lo},{hi}]"),
            summary.proposed_mean,
            summary.lof_mean
        );
    }
}

fn spike_sweep() {
    println!("\nSpike sweep: 22 channels, 10 spikes in channel 9, 60 s");
    println!(
        "{:>10} {:>10} {:>12} {:>12}",
        "mult", "hit%", "others", "rep cover%"
    );
    for mult in [10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 60.0] {
        let mut hits = 0usize;
        let mut total = 0usize;
        let mut other_flags = 0usize;
        let mut rep_covered = 0usize;
        let mut rep_total = 0usize;
        for seed in 0..5u64 {
            let (mut matrix, _) = generate(&ScenarioSpec::normal(22, 60.0, 2000 + seed)).unwrap();
            let mut labels = LabelMask::new(22, matrix.n_samples());
            inject(
                &mut matrix,
                &mut labels,
                &AnomalySpec {
                    kind: AnomalyKind::Spike { count: 10 },
                    channels: vec![9],
                    start: 400,
                    length: 2000,
                    magnitude: Magnitude::SigmaRange {
                        lo: mult,
                        hi: mult * 1.5,
                    },
                    seed: 77 + seed,
                },
            )
            .unwrap();
            inject(
                &mut matrix,
                &mut labels,
                &AnomalySpec {
                    kind: AnomalyKind::Repeated,
                    channels: vec![9],
                    start: 2800,
                    length: 240,
                    magnitude: Magnitude::Fixed(0.0),
                    seed: 78 + seed,
                },
            )
            .unwrap();
            let report = run_stream(&matrix, &DetectorConfig::default()).unwrap();
            for i in 0..matrix.n_samples() {
                if labels.is_labeled(9, i) {
                    let in_rep = (2800..3040).contains(&i);
                    if in_rep {
                        rep_total += 1;
                        if report.flags[9][i] {
                            rep_covered += 1;
                        }
                    } else {
                        total += 1;
                        if report.flags[9][i] {
                            hits += 1;
                        }
                    }
                }
            }
            for ch in (0..22).filter(|&c| c != 9) {
                other_flags += report.flagged_count(ch);
            }
        }
        println!(
            "{:>10} {:>10.1} {:>12} {:>12.1}",
            mult,
            100.0 * hits as f64 / total as f64,
            other_flags,
            100.0 * rep_covered as f64 / rep_total as f64
        );
    }
}

fn throughput() {
    let (matrix, _) = generate(&ScenarioSpec::normal(22, 60.0, 9)).unwrap();
    let cfg = DetectorConfig::default();
    let start = Instant::now();
    let report = run_stream(&matrix, &cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let positions = report.trace.len() as f64;
    println!(
        "\nThroughput: {} positions in {:.3} s = {:.0} windows/s ({:.0}x realtime)",
        positions,
        elapsed,
        positions / elapsed,
        60.0 / elapsed
    );
}

fn main() {
    clean_floor(
        "clean normal (10 seeds)",
        |seed| ScenarioSpec::normal(20, 30.0, seed),
        10,
    );
    clean_floor(
        "clean event  (10 seeds)",
        |seed| ScenarioSpec::with_event(20, 30.0, 100 + seed),
        10,
    );
    fdi_sweep();
    spike_sweep();
    throughput();
}
