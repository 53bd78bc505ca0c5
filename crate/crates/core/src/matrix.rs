//! Dense real matrices in column-major order.
//!
//! Every algorithm in this crate walks matrices column by column, so entries
//! are stored column-major and [`DenseMatrix::column`] returns a contiguous
//! slice. Matrices are validated on construction (finite entries, consistent
//! shape) and immutable afterwards, which makes them safe to share across
//! threads.

use crate::error::{Error, Result};

/// A dense `rows x cols` matrix of `f64` entries in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from entries in column-major order.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(Error::ShapeMismatch {
                rows,
                cols,
                expected: usize::MAX,
                actual: data.len(),
            })?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected,
                actual: data.len(),
            });
        }
        for (pos, value) in data.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row: pos % rows,
                    col: pos / rows,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from entries in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        let expected = rows.saturating_mul(cols);
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected,
                actual: data.len(),
            });
        }
        let mut col_major = vec![0.0; data.len()];
        for r in 0..rows {
            for c in 0..cols {
                col_major[c * rows + r] = data[r * cols + c];
            }
        }
        Self::from_column_major(rows, cols, col_major)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::EmptyMatrix {
                rows: columns.first().map_or(0, Vec::len),
                cols: columns.len(),
            });
        }
        let rows = columns[0].len();
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::ShapeMismatch {
                    rows,
                    cols: columns.len(),
                    expected: rows,
                    actual: col.len(),
                });
            }
            let _ = j;
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            data.extend_from_slice(col);
        }
        Self::from_column_major(rows, columns.len(), data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_column_major(n, n, data).expect("identity shape is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[col * self.rows + row]
    }

    /// Contiguous view of one column.
    pub fn column(&self, col: usize) -> &[f64] {
        debug_assert!(col < self.cols);
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    /// All entries in column-major order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Bᵀx` for a vector `x` with one entry per row.
    pub fn transpose_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        Ok((0..self.cols).map(|j| dot(self.column(j), x)).collect())
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for j in 0..other.cols {
            let out = &mut data[j * self.rows..(j + 1) * self.rows];
            for (k, &w) in other.column(j).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let col = self.column(k);
                for (o, &v) in out.iter_mut().zip(col) {
                    *o += w * v;
                }
            }
        }
        DenseMatrix::from_column_major(self.rows, other.cols, data)
    }

    /// Entry-wise `self + scale * other`.
    pub fn add_scaled(&self, scale: f64, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + scale * b)
            .collect();
        DenseMatrix::from_column_major(self.rows, self.cols, data)
    }

    /// Every entry multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Result<DenseMatrix> {
        let data = self.data.iter().map(|v| v * scale).collect();
        DenseMatrix::from_column_major(self.rows, self.cols, data)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &DenseMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut sum = CompensatedSum::new();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = a - b;
            sum.add(d * d);
        }
        sum.value().sqrt()
    }
}

/// Plain dot product of equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Euclidean norm computed with compensated summation.
///
/// Column norms feed normalization decisions, so the extra digits keep
/// repeated normalization bit-stable.
pub fn norm(a: &[f64]) -> f64 {
    let mut sum = CompensatedSum::new();
    for &x in a {
        sum.add(x * x);
    }
    sum.value().sqrt()
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
