//! Partial isometries between two families of vectors with equal Gramians.

use crate::error::{Error, Result};
use crate::numerics::{gram_schmidt_qr, nearest_isometry_with, right_pseudo_solve, CMatrix};

pub(crate) struct LurkingFit {
    /// `Q_range Q_domain*`: isometric on the span of the domain family, zero on its complement.
    pub l: CMatrix,
    pub domain_basis: CMatrix,
    pub range_basis: CMatrix,
    /// `max |X*X - Y*Y|`
    pub gram_mismatch: f64,
    /// `max_j |L x_j - y_j|`
    pub fit_residual: f64,
}

/// Fits `L x_j = y_j` for the columns of `x` and `y`. The map is first
/// found in least squares on a pivoted QR basis of span{x_j}, then snapped
/// to the nearest isometry.
pub(crate) fn fit(x: &CMatrix, y: &CMatrix, rank_rel: f64, gram_tol: f64) -> Result<LurkingFit> {
    assert_eq!(x.cols(), y.cols(), "families must have the same length");
    let gram_mismatch = (&x.adjoint().matmul(x) - &y.adjoint().matmul(y)).max_abs();
    if gram_mismatch > gram_tol {
        return Err(Error::ModelInconsistent { mismatch: gram_mismatch });
    }
    let qr = gram_schmidt_qr(x, true, rank_rel);
    let (l, range_basis) = if qr.rank() == 0 {
        (CMatrix::zeros(y.rows(), x.rows()), CMatrix::zeros(y.rows(), 0))
    } else {
        let m = right_pseudo_solve(y, &qr.r)?;
        let qe = nearest_isometry_with(&m, rank_rel)?;
        (qe.matmul(&qr.q.adjoint()), qe)
    };
    let fit_residual = (&l.matmul(x) - y).column_norms().into_iter().fold(0.0, f64::max);
    Ok(LurkingFit { l, domain_basis: qr.q, range_basis, gram_mismatch, fit_residual })
}
