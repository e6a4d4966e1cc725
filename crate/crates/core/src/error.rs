use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("duplicate material `{0}` in catalog")]
    DuplicateMaterial(String),

    #[error("invalid material `{name}`: {reason}")]
    InvalidMaterial { name: String, reason: String },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("incident angle {0}° outside [0°, 90°)")]
    AngleOutOfRange(f64),

    #[error("angle {angle}° beyond the lookup bound of {bound}°")]
    AngleBeyondBound { angle: f64, bound: f64 },

    #[error("material `{0}` not present in the RL database")]
    MaterialNotFound(String),

    #[error("schema error at row {row}, column {column}: {message}")]
    Schema {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("zero-length vector")]
    ZeroVector,

    #[error("consecutive points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("empty sample set")]
    EmptySamples,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { what, value })
    }
}
