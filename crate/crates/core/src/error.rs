//! Error types shared by the numerical routines.

use thiserror::Error;

/// Errors raised by matrix construction and the orthogonalization pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix shape {rows}x{cols} needs {expected} entries, got {actual}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("column {index} has norm {norm:e}, below the degenerate-column tolerance {tolerance:e}")]
    ZeroColumn {
        index: usize,
        norm: f64,
        tolerance: f64,
    },

    #[error("column {index} is numerically dependent on earlier columns")]
    RankDeficient { index: usize },

    #[error("column {index} has norm {norm}, not unit within tolerance")]
    NotNormalized { index: usize, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix must have at least as many rows as columns (got {rows}x{cols})")]
    Underdetermined { rows: usize, cols: usize },

    #[error("input is exactly orthonormal; remainder ratios are undefined")]
    ExactlyOrthonormal,

    #[error("orthogonality defect {defect:e} exceeds tolerance {tolerance:e}")]
    OrthogonalityDefect { defect: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
