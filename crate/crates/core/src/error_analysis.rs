//! Exact triangular error factors for basis approximations, the empirical
//! remainder ratios of their entries, and projection-energy certificates.
//!
//! For an approximating basis `B` (either the column-normalized `Ā` or the
//! raw `A`) with Gram-Schmidt orthonormalization `V`, the error factor is
//! the upper-triangular `U` with `V - B = B * U`. It is obtained from the
//! tracked Gram-Schmidt coefficients as `U = G - I` rather than by solving
//! `B U = V - B`, which would route the error through `BᵀB`.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{CompensatedSum, DenseMatrix};
use crate::ortho::{
    gram_residual, gram_schmidt, project_energy, GramResidual, GramSchmidtMode, UNIT_NORM_TOL,
};

/// Which basis an error factor was computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Column-normalized input `Ā`.
    Normalized,
    /// Raw input `A`.
    Raw,
}

impl BasisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisKind::Normalized => "normalized",
            BasisKind::Raw => "raw",
        }
    }
}

/// Upper-triangular `U` with `V - B = B * U`, plus the orthonormalized
/// basis it was measured against.
#[derive(Debug, Clone)]
pub struct ErrorFactor {
    dim: usize,
    u: DenseMatrix,
    basis_kind: BasisKind,
    consistency_residual: f64,
    orthonormal: DenseMatrix,
}

impl ErrorFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The full `d x d` factor; strictly lower entries are exactly zero.
    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    /// Entry `u_{ji}` (row `j`, column `i`).
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.u.get(j, i)
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    /// `max |B*U - (V - B)|` measured at construction.
    pub fn consistency_residual(&self) -> f64 {
        self.consistency_residual
    }

    /// The orthonormal basis `V` used to define the factor.
    pub fn orthonormal(&self) -> &DenseMatrix {
        &self.orthonormal
    }
}

impl Serialize for ErrorFactor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // row-major, upper triangle only: row j holds u[j][j..dim]
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|j| (j..self.dim).map(|i| self.u.get(j, i)).collect())
            .collect();
        let mut s = serializer.serialize_struct("ErrorFactor", 4)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("basis_kind", self.basis_kind.as_str())?;
        s.serialize_field("u", &rows)?;
        s.serialize_field("consistency_residual", &self.consistency_residual)?;
        s.end()
    }
}

/// Computes the error factor of a column-normalized basis.
///
/// Every column must have unit norm within [`UNIT_NORM_TOL`]; the diagonal
/// of the returned factor is nonnegative because each residual vector is a
/// projection of a unit vector.
pub fn error_factor_normalized(a_bar: &DenseMatrix) -> Result<ErrorFactor> {
    check_normalized(a_bar)?;
    factor_of(a_bar, BasisKind::Normalized)
}

/// Computes the error factor of an arbitrary full-column-rank basis.
pub fn error_factor_raw(a: &DenseMatrix) -> Result<ErrorFactor> {
    factor_of(a, BasisKind::Raw)
}

fn check_normalized(a: &DenseMatrix) -> Result<()> {
    for (i, w) in gram_residual(a).norm_squares().iter().enumerate() {
        let norm = w.sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotNormalized { index: i, norm });
        }
    }
    Ok(())
}

fn factor_of(basis: &DenseMatrix, kind: BasisKind) -> Result<ErrorFactor> {
    let d = basis.cols();
    let ortho = gram_schmidt(basis, GramSchmidtMode::Classical, true)?;
    let mut u_data = ortho.gs_coefficients().as_slice().to_vec();
    for i in 0..d {
        u_data[i * d + i] -= 1.0;
    }
    let u = DenseMatrix::from_column_major(d, d, u_data)?;

    // max |B*U - (V - B)|, which is just max |B*G - V|
    let bg = basis.matmul(ortho.gs_coefficients())?;
    let consistency_residual = bg.max_abs_diff(ortho.matrix());

    Ok(ErrorFactor {
        dim: d,
        u,
        basis_kind: kind,
        consistency_residual,
        orthonormal: ortho.into_matrix(),
    })
}

/// Empirical remainder ratios of an error factor's entries against the
/// Gram residual that produced them.
///
/// For the normalized basis the entries obey `u_ii = g_ii * ‖R‖_F²` with
/// `g_ii` bounded near 1/4 and `u_ji = -r_ji + g_ji * ‖R‖_F` with `g_ji`
/// vanishing as `R -> 0`; the ratios stored here are those `g` values
/// measured on concrete data. For a raw basis the diagonal is centered at
/// `(1 - w_ii)/2` first.
#[derive(Debug, Clone)]
pub struct RemainderRatios {
    dim: usize,
    frob_norm: f64,
    diag_ratios: Vec<f64>,
    offdiag_ratios: Vec<f64>,
    raw_diag_centered: Option<Vec<f64>>,
    raw_diag_ratios: Option<Vec<f64>>,
}

impl RemainderRatios {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `‖R‖_F` the ratios were taken against.
    pub fn frob_norm(&self) -> f64 {
        self.frob_norm
    }

    /// `u_ii / ‖R‖_F²` per column.
    pub fn diag_ratios(&self) -> &[f64] {
        &self.diag_ratios
    }

    /// `(u_ji + r_ji) / ‖R‖_F` for `j < i`.
    pub fn offdiag_ratio(&self, j: usize, i: usize) -> f64 {
        debug_assert!(j < i && i < self.dim);
        self.offdiag_ratios[i * (i - 1) / 2 + j]
    }

    pub fn max_diag_ratio(&self) -> f64 {
        self.diag_ratios.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Largest `|(u_ji + r_ji)| / ‖R‖_F`; `None` when `dim == 1`.
    pub fn max_abs_offdiag_ratio(&self) -> Option<f64> {
        if self.offdiag_ratios.is_empty() {
            None
        } else {
            Some(self.offdiag_ratios.iter().map(|v| v.abs()).fold(0.0, f64::max))
        }
    }

    /// `u_ii - (1 - w_ii)/2` per column; raw factors only.
    pub fn raw_diag_centered(&self) -> Option<&[f64]> {
        self.raw_diag_centered.as_deref()
    }

    /// `|u_ii - (1 - w_ii)/2| / max(|1 - w_ii|, ‖R‖_F²)`; raw factors only.
    pub fn raw_diag_ratios(&self) -> Option<&[f64]> {
        self.raw_diag_ratios.as_deref()
    }

    pub fn max_raw_diag_ratio(&self) -> Option<f64> {
        self.raw_diag_ratios
            .as_ref()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
    }
}

/// Measures the remainder ratios of `factor` against `residual`.
///
/// Fails with [`Error::ExactlyOrthonormal`] when `‖R‖_F == 0`, where every
/// ratio is undefined.
pub fn remainder_ratios(factor: &ErrorFactor, residual: &GramResidual) -> Result<RemainderRatios> {
    let d = factor.dim();
    if residual.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: residual.dim(),
        });
    }
    let frob = residual.frob_norm();
    if frob == 0.0 {
        return Err(Error::ExactlyOrthonormal);
    }
    let frob_sq = frob * frob;

    let diag_ratios: Vec<f64> = (0..d).map(|i| factor.entry(i, i) / frob_sq).collect();
    let mut offdiag_ratios = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in 0..i {
            offdiag_ratios.push((factor.entry(j, i) + residual.offdiag(j, i)) / frob);
        }
    }

    let (raw_diag_centered, raw_diag_ratios) = match factor.basis_kind() {
        BasisKind::Normalized => (None, None),
        BasisKind::Raw => {
            let w = residual.norm_squares();
            let centered: Vec<f64> = (0..d)
                .map(|i| factor.entry(i, i) - (1.0 - w[i]) / 2.0)
                .collect();
            let ratios: Vec<f64> = centered
                .iter()
                .zip(w)
                .map(|(c, wi)| c.abs() / (1.0 - wi).abs().max(frob_sq))
                .collect();
            (Some(centered), Some(ratios))
        }
    };

    Ok(RemainderRatios {
        dim: d,
        frob_norm: frob,
        diag_ratios,
        offdiag_ratios,
        raw_diag_centered,
        raw_diag_ratios,
    })
}

/// Certificate for approximating the projection energy `‖Vᵀx‖²` by
/// `‖Bᵀx‖²` without orthonormalizing.
///
/// The first-order bound is `d * ‖Bᵀx‖² * max|r̄|`; the Frobenius norm of
/// the residual is reported alongside because the remaining error term is
/// proportional to it with a vanishing coefficient.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EnergyCertificate {
    pub approx_energy: f64,
    pub exact_energy: Option<f64>,
    pub abs_error: Option<f64>,
    pub first_order_bound: f64,
    pub frob_term_scale: f64,
}

/// Builds the energy certificate for a column-normalized basis and vector.
///
/// With `compute_exact` the orthonormal basis is formed and the realized
/// error filled in; otherwise only the computable bound terms are returned.
pub fn energy_certificate(
    a_bar: &DenseMatrix,
    x: &[f64],
    compute_exact: bool,
) -> Result<EnergyCertificate> {
    if x.len() != a_bar.rows() {
        return Err(Error::DimensionMismatch {
            expected: a_bar.rows(),
            actual: x.len(),
        });
    }
    check_normalized(a_bar)?;

    let residual = gram_residual(a_bar);
    let approx_energy = project_energy(a_bar, x)?;
    let first_order_bound = a_bar.cols() as f64 * approx_energy * residual.max_abs();

    let (exact_energy, abs_error) = if compute_exact {
        let v = gram_schmidt(a_bar, GramSchmidtMode::Classical, true)?;
        let exact = project_energy(v.matrix(), x)?;
        (Some(exact), Some((exact - approx_energy).abs()))
    } else {
        (None, None)
    };

    Ok(EnergyCertificate {
        approx_energy,
        exact_energy,
        abs_error,
        first_order_bound,
        frob_term_scale: residual.frob_norm(),
    })
}

/// `c = Uᵀ b` for an upper-triangular factor; the correction that maps the
/// approximate projection onto the exact one.
pub fn correction_vector(factor: &ErrorFactor, b: &[f64]) -> Result<Vec<f64>> {
    let d = factor.dim();
    if b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: b.len(),
        });
    }
    Ok((0..d)
        .map(|i| {
            let mut sum = CompensatedSum::new();
            for (m, bm) in b.iter().enumerate().take(i + 1) {
                sum.add(factor.entry(m, i) * bm);
            }
            sum.value()
        })
        .collect())
}
