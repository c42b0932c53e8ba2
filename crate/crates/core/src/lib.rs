//! Online detection of low-quality synchrophasor (PMU) data.
//!
//! Regional PMU channels move together under both normal and event
//! conditions; data anomalies break that coherence. This crate scores
//! each channel's similarity to its peers over a sliding window, combining
//! a time-domain dispersion index with frequency-domain magnitude and
//! phase indices, and flags channels whose weighted similarity degree
//! stays below a threshold across consecutive windows. A density-based
//! Local Outlier Factor detector over the same sliding machinery serves
//! as the comparison baseline, and a synthetic data generator produces
//! labeled multi-channel datasets for evaluation.

pub mod config;
pub mod detector;
pub mod error;
pub mod io;
pub mod lof;
pub mod report;
pub mod signal;
pub mod similarity;
pub mod spectrum;
pub mod synth;

pub use config::SimilarityConfig;
pub use detector::{
    detect_window, run_stream, DetectorConfig, StreamDelta, StreamDetector, WindowDecision,
};
pub use error::{Error, Result};
pub use lof::{lof_feature, lof_scores, run_lof, LofConfig};
pub use report::{DetectionReport, WindowTrace};
pub use signal::{SignalMatrix, WindowView};
pub use similarity::{
    dynamic_change_similarity, frequency_magnitude_similarity, frequency_phase_similarity,
    magnitude_distance_profile, pair_similarity, phase_distance_profile, similarity_degree,
    similarity_degrees, std_dev, PairIndices,
};
pub use spectrum::{spectrum, Spectrum, SpectrumAnalyzer};
pub use synth::{
    equal_sigma_pair, generate, inject, monte_carlo_compare, AnomalyKind, AnomalySpec,
    CompareConfig, CompareSummary, EventSpec, FdiShape, LabelMask, Magnitude, ModeSpec,
    ScenarioMeta, ScenarioSpec, TrialOutcome,
};
