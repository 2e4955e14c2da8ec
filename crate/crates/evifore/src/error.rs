//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while ingesting data, fusing evidence, or
/// producing forecasts.
#[derive(Debug, Error)]
pub enum Error {
    /// A value was zero, negative, or non-finite. Ratio masses divide by the
    /// observations themselves, so such data is unusable.
    #[error("non-positive or non-finite value {value}{}", row_suffix(*row))]
    NonPositiveValue { value: f64, row: Option<u64> },

    /// Timestamps must strictly increase along a series.
    #[error("non-monotone timestamp: {t_new} does not follow {t_prev}{}", row_suffix(*row))]
    NonMonotoneTimestamp {
        t_prev: f64,
        t_new: f64,
        row: Option<u64>,
    },

    /// The operation needs more observations than were supplied.
    #[error("series too short: need at least {needed} points, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// Index outside the valid 1-based range of historical points.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// The combination is undefined because the normalization constant
    /// 1 - k vanished.
    #[error("total conflict: 1 - k = {one_minus_k:e} is numerically zero")]
    TotalConflict { one_minus_k: f64 },

    /// Mass functions being combined must share a single frame of
    /// discernment.
    #[error("mismatched frames of discernment")]
    MismatchedFrames,

    /// The exact power-set combiner only handles small frames.
    #[error("frame of {size} hypotheses exceeds the supported maximum of {max}")]
    FrameTooLarge { size: usize, max: usize },

    /// A mass function violated a construction rule.
    #[error("invalid mass assignment: {reason}")]
    InvalidMass { reason: String },

    /// Prediction and truth sequences must align.
    #[error("length mismatch: {pred} predictions vs {truth} observations")]
    LengthMismatch { pred: usize, truth: usize },

    /// The input sequence was empty where at least one element is required.
    #[error("empty input")]
    EmptyInput,

    /// NRMSE is undefined when the truth sequence has zero range.
    #[error("zero range: max(truth) equals min(truth), NRMSE undefined")]
    ZeroRange,

    /// Moving-average windows must contain at least one observation.
    #[error("window length must be at least 1")]
    EmptyWindow,

    /// A CSV field failed to parse as a finite number.
    #[error("row {row}: cannot parse {field:?} as a number")]
    Parse { row: u64, field: String },

    /// A named column was not present in the CSV header.
    #[error("column {name:?} not found in header")]
    ColumnNotFound { name: String },

    /// A referenced column index was beyond the record width.
    #[error("row {row}: column index {index} out of bounds for record of width {width}")]
    ColumnOutOfBounds { row: u64, index: usize, width: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Snapshot was written by an unsupported format version.
    #[error("snapshot version mismatch: found {found}, supported {supported}")]
    VersionMismatch { found: u64, supported: u32 },

    /// Snapshot file failed to parse or violated its own invariants.
    #[error("corrupt snapshot: {reason}")]
    CorruptSnapshot { reason: String },
}

fn row_suffix(row: Option<u64>) -> String {
    match row {
        Some(r) => format!(" (row {r})"),
        None => String::new(),
    }
}
