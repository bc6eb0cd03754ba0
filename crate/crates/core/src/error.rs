//! Error types shared across the crate.

use thiserror::Error;

/// Structured description of a violated placement constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintViolation {
    /// Sensor count does not match `groups * per_group`.
    CountMismatch { expected: usize, actual: usize },
    /// A position falls outside `[0, D]` or the list is not non-decreasing.
    Bound { index: usize, position: f64 },
    /// Consecutive sensors within a group closer than `d_min`.
    IntraGroupSpacing { group: usize, gap: f64, required: f64 },
    /// First sensors of consecutive groups closer than `per_group * d_min`.
    InterGroupSpacing { group: usize, gap: f64, required: f64 },
    /// `d_min` itself cannot fit `K` sensors on the segment.
    InfeasibleMinSpacing { d_min: f64, limit: f64 },
}

impl std::fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::CountMismatch { expected, actual } => {
                write!(f, "expected {expected} positions, got {actual}")
            }
            Self::Bound { index, position } => {
                write!(f, "position {position} at index {index} violates segment bounds or ordering")
            }
            Self::IntraGroupSpacing { group, gap, required } => {
                write!(f, "intra-group gap {gap} in group {group} below minimum spacing {required}")
            }
            Self::InterGroupSpacing { group, gap, required } => {
                write!(f, "inter-group gap {gap} before group {group} below required {required}")
            }
            Self::InfeasibleMinSpacing { d_min, limit } => {
                write!(f, "minimum spacing {d_min} infeasible: must lie in (0, {limit}]")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(ConstraintViolation),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular geometry: {0}")]
    Singularity(String),
    #[error("search space too large: {candidates} candidates; use grid_step >= {suggested_step}")]
    SearchSpace { candidates: u128, suggested_step: f64 },
    #[error("interpolation fit ill-conditioned: relative residual {residual}")]
    Conditioning { residual: f64 },
    #[error("ambiguous spectrum: {0}")]
    Ambiguity(String),
    #[error("{failed} of {total} trials failed")]
    TrialFailures { failed: usize, total: usize },
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
