//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building operators or running solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A matrix entry was NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    /// The input was not Hermitian within tolerance.
    #[error("matrix is not Hermitian: max |A - A^dagger| entry = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// The Jacobi eigensolver did not reach its off-diagonal target.
    #[error("eigensolver did not converge after {sweeps} sweeps (relative off-diagonal residual {residual:.3e})")]
    EigNonConvergence { sweeps: usize, residual: f64 },

    /// A state failed positivity or normalization checks.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A significance level was outside its admissible range.
    #[error("significance level alpha = {alpha} outside {expected}")]
    InvalidAlpha { alpha: f64, expected: &'static str },

    /// A probability vector failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A projector argument was not idempotent or had no overlap.
    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    /// A parameter was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A scaling fit was requested on unusable data.
    #[error("scaling fit rejected: {0}")]
    FitRejected(String),

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
