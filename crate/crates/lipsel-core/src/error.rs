//! Error taxonomy shared by all modules.
//!
//! Three failure classes are distinguished because they drive distinct exit
//! codes and handling at the interface boundary: malformed inputs, genuine
//! mathematical infeasibility (a hypothesis of the underlying theorems fails
//! on the given data, with the offending vertices named), and internal
//! invariant violations that indicate a bug rather than bad data.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Clone, Debug, Error)]
pub enum Error {
    /// The input data violates a documented precondition (shape mismatch,
    /// non-symmetric matrix, invalid modulus table, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A mathematically meaningful hypothesis fails on the given instance:
    /// no selection with the required Lipschitz bound exists at the named
    /// vertices. `stage` identifies where the failure surfaced.
    #[error("hypothesis failure at {stage} (vertices {vertices:?}): {detail}")]
    HypothesisFailure {
        /// Pipeline stage that detected the failure (e.g. `"anchor"`,
        /// `"cube-two-point"`).
        stage: String,
        /// Offending vertex indices in the space the stage operates on.
        vertices: Vec<usize>,
        /// Human-readable quantitative detail.
        detail: String,
    },

    /// A sampled linear system is inconsistent at one of its points: the
    /// least-squares residual of `A(x) f = b(x)` exceeds the tolerance.
    #[error("inconsistent linear system at point {point}: residual {residual:.3e}")]
    InconsistentSystem {
        /// Index of the offending sample point.
        point: usize,
        /// Euclidean residual of the least-squares solution.
        residual: f64,
    },

    /// An internal invariant failed; this is a bug, not a property of the
    /// input data.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error reports mathematical infeasibility of the instance
    /// (as opposed to malformed input or an internal bug).
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::HypothesisFailure { .. } | Error::InconsistentSystem { .. }
        )
    }
}
