//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by signal construction, the similarity kernel, the
/// detectors and the synthetic data generator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("window too short: {got} samples, need at least {required}")]
    WindowTooShort { required: usize, got: usize },

    #[error("sample rate must be positive, got {0}")]
    InvalidSampleRate(f64),

    #[error("non-finite sample in channel {channel} at index {index}")]
    NonFiniteSample { channel: String, index: usize },

    #[error("window lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample rates differ: {left} vs {right}")]
    SampleRateMismatch { left: f64, right: f64 },

    #[error("spectra are incompatible: {0}")]
    SpectrumMismatch(String),

    #[error("no frequency bins in band ({low_hz}, {high_hz}] Hz at resolution {resolution_hz} Hz")]
    EmptyBand {
        low_hz: f64,
        high_hz: f64,
        resolution_hz: f64,
    },

    #[error("empty similarity profile")]
    EmptyProfile,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("need at least {required} channels, got {got}")]
    TooFewChannels { required: usize, got: usize },

    #[error("channel index {index} out of range for {n_channels} channels")]
    ChannelOutOfRange { index: usize, n_channels: usize },

    #[error("window [{start}, {end}) exceeds signal length {len}")]
    WindowOutOfRange { start: usize, end: usize, len: usize },

    #[error("channel lengths are not uniform: channel {channel} has {got} samples, expected {expected}")]
    RaggedChannels {
        channel: String,
        expected: usize,
        got: usize,
    },

    #[error("batch has {got} channels, stream expects {expected}")]
    ChannelCountMismatch { expected: usize, got: usize },

    #[error("batch channels carry unequal sample counts")]
    RaggedBatch,

    #[error("invalid anomaly: {0}")]
    InvalidAnomaly(String),

    #[error("anomaly overlaps an existing injection on channel {channel} at sample {index}")]
    AnomalyOverlap { channel: usize, index: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
