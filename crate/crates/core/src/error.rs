use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The scenario text is not valid structured text, or has an unknown key.
    #[error("parse error: {0}")]
    Parse(String),

    /// A field parsed but holds an out-of-range value.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// A numerical routine was called outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("distance {distance_km} km outside the ITM area-mode range [1, 2000] km")]
    DistanceOutOfRange { distance_km: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("reports are not from matching runs: {0}")]
    MismatchedRuns(String),

    #[error("loss threshold {threshold_percent}% not met within the sweep (largest distance {max_distance_km} km)")]
    ThresholdNotMet { threshold_percent: f64, max_distance_km: f64 },

    #[error("losses are not monotone in distance ({0}); add drops or lengthen the run")]
    NonMonotone(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
