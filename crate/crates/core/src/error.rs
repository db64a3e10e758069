use thiserror::Error;

use crate::amplitude::ModeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two particles in one mode.
    #[error("mode {0} occupied twice (exclusion violated)")]
    DuplicateMode(ModeId),

    #[error("basis term has {found} particles, state holds {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("single-particle factors overlap on mode {0}")]
    OverlappingFactors(ModeId),

    #[error("mode order must list each of the {expected} modes exactly once")]
    InvalidModeOrder { expected: usize },

    #[error("mode {0} is outside the mode map's domain")]
    ModeOutsideMap(ModeId),

    #[error("term has two particles at station {station}; post-selection not applied")]
    DoubleStationOccupancy { station: usize },

    #[error("mode {0} is not a detector mode")]
    NotDetectorMode(ModeId),

    #[error("outcome has {found} stations, expected {expected}")]
    StationCountMismatch { expected: usize, found: usize },

    #[error("invalid outcome string {0:?}")]
    InvalidOutcome(String),

    #[error("parity flag q must be 0 or 1, got {0}")]
    InvalidParityFlag(i64),

    #[error("{total_log2} bits of strategy space exceed the enumeration guard of 2^{limit_log2}")]
    EnumerationGuard { total_log2: usize, limit_log2: usize },

    #[error("invalid hidden-variable configuration: {0}")]
    InvalidConfig(String),

    #[error("sample {index} has parity {found:+}, expected {expected:+}")]
    ParityViolation { index: usize, expected: i8, found: i8 },

    #[error("interferometer phase {theta} does not match parity flag q={q}")]
    PhaseMismatch { theta: f64, q: u8 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
