use std::path::PathBuf;

use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("singular Liouvillian: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularLiouvillian { pivot: f64, threshold: f64 },

    #[error("singular Liouvillian: {0}")]
    UnreachableSteadyState(String),

    #[error("resonant s = {s}: resolvent matrix is singular")]
    ResonantS { s: Complex64 },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("truncation inadequate: |C(t_max)|/|C(0)| = {ratio:.3e} exceeds {bound:.1e}; increase t_max")]
    TruncationInadequate { ratio: f64, bound: f64 },

    #[error("every grid point failed to evaluate")]
    AllPointsInvalid,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors that stem from a degenerate (non-unique or
    /// non-decaying) stationary state.
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            Error::SingularLiouvillian { .. } | Error::UnreachableSteadyState(_)
        )
    }
}
