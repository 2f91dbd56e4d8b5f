use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Probability mass lost to the Fock cutoff exceeds the allowed tolerance.
    #[error("cutoff {cutoff} too small for {context}: lost mass {lost:.3e} exceeds {tolerance:.1e}")]
    CutoffTooSmall {
        context: String,
        cutoff: usize,
        lost: f64,
        tolerance: f64,
    },

    #[error("outcome grid too coarse: integrated probability {total:.6} deviates from {expected:.6} by more than {tolerance:.1e}")]
    GridTooCoarse {
        total: f64,
        expected: f64,
        tolerance: f64,
    },

    #[error("degenerate entangled coherent state: |alpha - beta| = {separation:.3e}")]
    DegenerateEcs { separation: f64 },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("{name} = {value} outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("purification reduced state deviates from the declared state by {deviation:.3e}")]
    PurificationMismatch { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }

    /// True for the truncation and discretization failures.
    pub fn is_accuracy_failure(&self) -> bool {
        matches!(self, Error::CutoffTooSmall { .. } | Error::GridTooCoarse { .. })
    }
}
