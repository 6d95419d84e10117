//! Error type shared across the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // --- ingest ---
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("duplicate timestamp {timestamp}")]
    DuplicateTimestamp { timestamp: String },

    #[error("non-uniform sample interval: {reason}")]
    NonUniformInterval { reason: String },

    #[error("no column is mapped to the mains channel")]
    NoMainsColumn,

    #[error("duplicate channel name '{0}'")]
    DuplicateChannel(String),

    #[error("negative value {value} kW in channel '{channel}' at row {row}")]
    NegativeValue {
        channel: String,
        row: usize,
        value: f64,
    },

    #[error(
        "residual {residual} kW at row {row} is below -tolerance*mains ({limit} kW); \
         a generator channel may be mislabeled as a consumer"
    )]
    NegativeResidual {
        row: usize,
        residual: f64,
        limit: f64,
    },

    #[error("bad CSV header: {0}")]
    BadHeader(String),

    // --- symbolize ---
    #[error("window plan needs {required} samples but the series has {available}")]
    PlanTooLong { required: usize, available: usize },

    #[error("value {0} is outside [0, 1]; input was not normalized")]
    ValueOutOfUnitInterval(f64),

    #[error("alphabet must have between 2 and 26 symbols, got {0}")]
    BadSymbolCount(usize),

    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),

    // --- motif ---
    #[error("series has no non-mains channels; a star motif needs at least one leaf")]
    NoChannels,

    #[error(
        "{what} of {value} s is not a positive multiple of the sample interval ({interval} s)"
    )]
    IncompatibleResolution {
        what: &'static str,
        value: u64,
        interval: u64,
    },

    #[error("window of {window_samples} samples does not fit a series of {n_samples} samples")]
    WindowLongerThanSeries {
        window_samples: usize,
        n_samples: usize,
    },

    #[error("stride of {stride} samples exceeds window length of {window} samples")]
    StrideExceedsWindow { stride: usize, window: usize },

    #[error("channel '{channel}' is not aligned with the window plan: {reason}")]
    MisalignedWindows { channel: String, reason: String },

    #[error("delta {delta} exceeds the number of frames ({frames})")]
    DeltaTooLarge { delta: usize, frames: usize },

    // --- hierarchy ---
    #[error("children of '{node}' share no common time span")]
    NoCommonSpan { node: String },

    #[error("children of '{node}' have mixed sample intervals ({intervals:?} s)")]
    MixedResolution { node: String, intervals: Vec<u64> },

    // --- mine ---
    #[error("motifs have mixed deltas ({0} and {1}); counts require a single delta")]
    MixedDelta(usize, usize),

    #[error("signature counts diverge from the brute-force cross-check: {0}")]
    CountMismatch(String),

    // --- config / cli ---
    #[error("invalid configuration: {0}")]
    Config(String),

    // --- plumbing ---
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for validation errors, 2 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            Error::Csv(err) if err.is_io_error() => 2,
            _ => 1,
        }
    }
}
