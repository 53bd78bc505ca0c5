//! Column normalization, Gram-Schmidt orthonormalization with coefficient
//! tracking, Gram residuals, and projection energies.
//!
//! The orthonormalization keeps the upper-triangular coefficient matrix `G`
//! with `V = A * G` up to date during the sweep instead of recovering it
//! afterwards from `AᵀA`, so the factorization residual stays near machine
//! precision for well-conditioned inputs.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, CompensatedSum, DenseMatrix};

/// Default bound on `max |VᵀV - I|` accepted as orthonormal.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-10;
/// Columns whose residual shrinks below this fraction of their input norm
/// are treated as linearly dependent.
pub const RANK_TOL_REL: f64 = 1e-12;
/// Columns with norm below this are rejected outright.
pub const DEGENERATE_COLUMN_TOL: f64 = 1e-300;
/// Tolerance for accepting a column as unit-norm.
pub const UNIT_NORM_TOL: f64 = 1e-10;

// Norms within a few ulps of one are left untouched by normalization; this
// keeps normalization exactly idempotent.
const NORM_SKIP_TOL: f64 = 16.0 * f64::EPSILON;

/// Gram-Schmidt projection order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSchmidtMode {
    /// Projection coefficients taken against the original column.
    Classical,
    /// Projection coefficients taken against the running residual.
    Modified,
}

/// An orthonormal basis `V` together with the coefficients `G` expressing it
/// in terms of the input columns, `V = A * G`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    matrix: DenseMatrix,
    gs_coefficients: DenseMatrix,
    ortho_defect: f64,
}

impl OrthonormalBasis {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Upper-triangular `G` with `V = A * G` and strictly positive diagonal.
    pub fn gs_coefficients(&self) -> &DenseMatrix {
        &self.gs_coefficients
    }

    /// `max |VᵀV - I|` measured after construction.
    pub fn ortho_defect(&self) -> f64 {
        self.ortho_defect
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_orthonormal(&self, tolerance: f64) -> bool {
        self.ortho_defect <= tolerance
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

/// Scales every column to unit norm.
///
/// Columns already within a few ulps of unit norm are returned bit-identical,
/// so the operation is exactly idempotent.
pub fn normalize_columns(a: &DenseMatrix) -> Result<DenseMatrix> {
    let mut columns = Vec::with_capacity(a.cols());
    for j in 0..a.cols() {
        let col = a.column(j);
        let s = norm(col);
        if s < DEGENERATE_COLUMN_TOL {
            return Err(Error::ZeroColumn {
                index: j,
                norm: s,
                tolerance: DEGENERATE_COLUMN_TOL,
            });
        }
        if (s - 1.0).abs() <= NORM_SKIP_TOL {
            columns.push(col.to_vec());
        } else {
            let inv = 1.0 / s;
            columns.push(col.iter().map(|v| v * inv).collect());
        }
    }
    DenseMatrix::from_columns(&columns)
}

/// Orthonormalizes the columns of `a` in order, tracking the coefficient
/// matrix `G` with `V = A * G`.
///
/// With `reorthogonalize` a second projection sweep is applied to each
/// column before normalization, which restores orthogonality that a single
/// pass loses on poorly conditioned input.
pub fn gram_schmidt(
    a: &DenseMatrix,
    mode: GramSchmidtMode,
    reorthogonalize: bool,
) -> Result<OrthonormalBasis> {
    let n = a.rows();
    let d = a.cols();
    if n < d {
        return Err(Error::Underdetermined { rows: n, cols: d });
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(d);

    for i in 0..d {
        let input = a.column(i);
        let input_norm = norm(input);
        let mut work = input.to_vec();
        let mut gcol = vec![0.0; d];
        gcol[i] = 1.0;

        match mode {
            GramSchmidtMode::Classical => {
                let projections: Vec<f64> =
                    (0..i).map(|m| dot(input, &basis[m])).collect();
                for (m, &c) in projections.iter().enumerate() {
                    subtract_scaled(&mut work, c, &basis[m]);
                    subtract_scaled(&mut gcol[..=m], c, &coeffs[m][..=m]);
                }
            }
            GramSchmidtMode::Modified => {
                for m in 0..i {
                    let c = dot(&work, &basis[m]);
                    subtract_scaled(&mut work, c, &basis[m]);
                    subtract_scaled(&mut gcol[..=m], c, &coeffs[m][..=m]);
                }
            }
        }

        if reorthogonalize {
            for m in 0..i {
                let c = dot(&work, &basis[m]);
                subtract_scaled(&mut work, c, &basis[m]);
                subtract_scaled(&mut gcol[..=m], c, &coeffs[m][..=m]);
            }
        }

        let residual_norm = norm(&work);
        if residual_norm <= RANK_TOL_REL * input_norm {
            return Err(Error::RankDeficient { index: i });
        }
        if (residual_norm - 1.0).abs() > NORM_SKIP_TOL {
            let inv = 1.0 / residual_norm;
            for v in &mut work {
                *v *= inv;
            }
            for g in &mut gcol[..=i] {
                *g *= inv;
            }
        }
        basis.push(work);
        coeffs.push(gcol);
    }

    let matrix = DenseMatrix::from_columns(&basis)?;
    let gs_coefficients = DenseMatrix::from_columns(&coeffs)?;
    let ortho_defect = ortho_defect(&matrix);
    Ok(OrthonormalBasis {
        matrix,
        gs_coefficients,
        ortho_defect,
    })
}

fn subtract_scaled(target: &mut [f64], scale: f64, source: &[f64]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= scale * s;
    }
}

/// `max |VᵀV - I|` over all entries.
pub fn ortho_defect(v: &DenseMatrix) -> f64 {
    let d = v.cols();
    let mut worst = 0.0f64;
    for i in 0..d {
        let ci = v.column(i);
        for j in i..d {
            let g = dot(v.column(j), ci);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// The Gram residual of a basis: off-diagonal inner products `aⱼᵀaᵢ` plus
/// the diagonal of column norm-squares, kept separately.
///
/// For a column-normalized basis this is `ĀᵀĀ - I`; in general it is
/// `AᵀA - W` with `W = diag(‖aᵢ‖²)`. The off-diagonal part is stored once
/// (strict upper triangle) and mirrored on read.
#[derive(Debug, Clone, PartialEq)]
pub struct GramResidual {
    dim: usize,
    offdiag_upper: Vec<f64>,
    norm_squares: Vec<f64>,
    frob_norm: f64,
    max_abs: f64,
}

impl GramResidual {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Off-diagonal entry `(j, i)`; zero on the diagonal.
    pub fn offdiag(&self, j: usize, i: usize) -> f64 {
        debug_assert!(j < self.dim && i < self.dim);
        if j == i {
            return 0.0;
        }
        let (lo, hi) = if j < i { (j, i) } else { (i, j) };
        self.offdiag_upper[hi * (hi - 1) / 2 + lo]
    }

    /// Column norm-squares `wᵢᵢ = ‖aᵢ‖²`.
    pub fn norm_squares(&self) -> &[f64] {
        &self.norm_squares
    }

    /// Frobenius norm of the (symmetric, zero-diagonal) residual matrix.
    pub fn frob_norm(&self) -> f64 {
        self.frob_norm
    }

    /// Largest `|rⱼᵢ|` over `j ≠ i`; zero when `dim == 1`.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// True when every norm-square is 1 within 1e-12.
    pub fn is_normalized(&self) -> bool {
        self.norm_squares.iter().all(|w| (w - 1.0).abs() <= 1e-12)
    }
}

/// Computes the Gram residual of `a`.
pub fn gram_residual(a: &DenseMatrix) -> GramResidual {
    let d = a.cols();
    let mut offdiag_upper = Vec::with_capacity(d * (d - 1) / 2);
    let mut norm_squares = Vec::with_capacity(d);
    let mut frob_sq = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    for i in 0..d {
        let ci = a.column(i);
        for j in 0..i {
            let r = dot(a.column(j), ci);
            offdiag_upper.push(r);
            // mirrored entry counts twice in the Frobenius norm
            frob_sq.add(2.0 * r * r);
            max_abs = max_abs.max(r.abs());
        }
        let mut w = CompensatedSum::new();
        for &x in ci {
            w.add(x * x);
        }
        norm_squares.push(w.value());
    }
    GramResidual {
        dim: d,
        offdiag_upper,
        norm_squares,
        frob_norm: frob_sq.value().sqrt(),
        max_abs,
    }
}

/// Squared projection energy `‖Bᵀx‖²`.
pub fn project_energy(b: &DenseMatrix, x: &[f64]) -> Result<f64> {
    let projected = b.transpose_apply(x)?;
    let mut sum = CompensatedSum::new();
    for v in projected {
        sum.add(v * v);
    }
    Ok(sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: usize, cols: usize, col_major: &[f64]) -> DenseMatrix {
        DenseMatrix::from_column_major(rows, cols, col_major.to_vec()).unwrap()
    }

    #[test]
    fn normalize_identity_is_identity() {
        let i = DenseMatrix::identity(2);
        assert_eq!(normalize_columns(&i).unwrap(), i);
    }

    #[test]
    fn normalize_three_four_five() {
        let a = matrix(2, 1, &[3.0, 4.0]);
        let n = normalize_columns(&a).unwrap();
        assert_eq!(n.column(0), &[0.6, 0.8]);
    }

    #[test]
    fn normalize_axis_scaling() {
        let a = matrix(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert_eq!(normalize_columns(&a).unwrap(), DenseMatrix::identity(2));
    }

    #[test]
    fn normalize_rejects_zero_column() {
        let a = matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            normalize_columns(&a),
            Err(Error::ZeroColumn { index: 1, .. })
        ));
    }

    #[test]
    fn gram_schmidt_identity_fixed_point() {
        let i = DenseMatrix::identity(3);
        let b = gram_schmidt(&i, GramSchmidtMode::Classical, false).unwrap();
        assert_eq!(*b.matrix(), i);
        assert_eq!(*b.gs_coefficients(), i);
        assert_eq!(b.ortho_defect(), 0.0);
    }

    #[test]
    fn gram_schmidt_two_column_closed_form() {
        // a1 = [1, 0], a2 = [0.1, sqrt(0.99)]: v2 = [0, 1] and
        // G = [[1, -0.1/sqrt(0.99)], [0, 1/sqrt(0.99)]].
        let s = 0.99f64.sqrt();
        let a = matrix(2, 2, &[1.0, 0.0, 0.1, s]);
        let b = gram_schmidt(&a, GramSchmidtMode::Classical, false).unwrap();
        assert!(b.matrix().max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        let g = b.gs_coefficients();
        assert!((g.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((g.get(0, 1) - (-0.1 / s)).abs() < 1e-15);
        assert!((g.get(1, 1) - 1.0 / s).abs() < 1e-15);
        assert_eq!(g.get(1, 0), 0.0);
    }

    #[test]
    fn gram_schmidt_orthogonal_unnormalized_input() {
        let a = matrix(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let b = gram_schmidt(&a, GramSchmidtMode::Classical, false).unwrap();
        assert_eq!(*b.matrix(), DenseMatrix::identity(2));
        let g = b.gs_coefficients();
        assert_eq!(g.get(0, 0), 0.5);
        assert!((g.get(1, 1) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(g.get(0, 1), 0.0);
    }

    #[test]
    fn gram_schmidt_detects_rank_deficiency() {
        let a = matrix(3, 2, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        assert!(matches!(
            gram_schmidt(&a, GramSchmidtMode::Classical, false),
            Err(Error::RankDeficient { index: 1 })
        ));
    }

    #[test]
    fn gram_schmidt_rejects_wide_matrices() {
        let a = matrix(1, 2, &[1.0, 2.0]);
        assert!(matches!(
            gram_schmidt(&a, GramSchmidtMode::Classical, false),
            Err(Error::Underdetermined { rows: 1, cols: 2 })
        ));
    }

    #[test]
    fn modes_agree_on_well_conditioned_input() {
        let a = matrix(3, 2, &[1.0, 1.0, 0.0, 0.5, -1.0, 2.0]);
        let c = gram_schmidt(&a, GramSchmidtMode::Classical, false).unwrap();
        let m = gram_schmidt(&a, GramSchmidtMode::Modified, false).unwrap();
        let r = gram_schmidt(&a, GramSchmidtMode::Classical, true).unwrap();
        assert!(c.matrix().max_abs_diff(m.matrix()) < 1e-8);
        assert!(c.matrix().max_abs_diff(r.matrix()) < 1e-8);
    }

    #[test]
    fn gram_residual_identity() {
        let r = gram_residual(&DenseMatrix::identity(3));
        assert_eq!(r.frob_norm(), 0.0);
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r.norm_squares(), &[1.0, 1.0, 1.0]);
        assert!(r.is_normalized());
    }

    #[test]
    fn gram_residual_two_column_case() {
        let s = 0.99f64.sqrt();
        let a = matrix(2, 2, &[1.0, 0.0, 0.1, s]);
        let r = gram_residual(&a);
        assert!((r.offdiag(0, 1) - 0.1).abs() < 1e-15);
        assert!((r.offdiag(1, 0) - 0.1).abs() < 1e-15);
        assert_eq!(r.offdiag(0, 0), 0.0);
        assert!((r.frob_norm() - 0.02f64.sqrt()).abs() < 1e-15);
        assert!((r.max_abs() - 0.1).abs() < 1e-15);
        assert!(r.is_normalized());
    }

    #[test]
    fn gram_residual_single_column() {
        let a = matrix(2, 1, &[1.1, 0.0]);
        let r = gram_residual(&a);
        assert!((r.norm_squares()[0] - 1.21).abs() < 1e-15);
        assert_eq!(r.frob_norm(), 0.0);
        assert_eq!(r.max_abs(), 0.0);
        assert!(!r.is_normalized());
    }

    #[test]
    fn project_energy_examples() {
        let i = DenseMatrix::identity(2);
        assert_eq!(project_energy(&i, &[1.0, 1.0]).unwrap(), 2.0);

        let s = 0.99f64.sqrt();
        let a = matrix(2, 2, &[1.0, 0.0, 0.1, s]);
        let e = project_energy(&a, &[1.0, 1.0]).unwrap();
        let expected = 1.0 + (0.1 + s) * (0.1 + s);
        assert!((e - expected).abs() < 1e-14);
        assert!((e - 2.198_997_487_421_324).abs() < 1e-9);

        assert!(matches!(
            project_energy(&i, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn normalization_skip_keeps_exact_unit_columns() {
        let s = 0.99f64.sqrt();
        let a = matrix(2, 2, &[1.0, 0.0, 0.1, s]);
        let n = normalize_columns(&a).unwrap();
        // 0.1^2 + 0.99 sums to exactly 1.0, so the column is untouched.
        assert_eq!(n, a);
    }
}
