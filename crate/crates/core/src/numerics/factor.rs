//! Orthogonal factorizations: Gram-Schmidt QR, orthonormal completion,
//! polar factor.

use super::eigen::herm_eig;
use super::matrix::{inner, vec_norm, CMatrix, HermitianMatrix, C64};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Thin QR `A[:, perm] ~ Q R` produced by modified Gram-Schmidt with one
/// reorthogonalization pass.
#[derive(Debug, Clone)]
pub struct Qr {
    /// Orthonormal columns spanning the numerical range (rows x rank).
    pub q: CMatrix,
    /// Coefficients `Q* A`, indexed by the original column order (rank x cols).
    pub r: CMatrix,
    /// Column order in which the basis was built.
    pub pivots: Vec<usize>,
}

impl Qr {
    pub fn rank(&self) -> usize {
        self.q.cols()
    }
}

/// Gram-Schmidt QR. With `pivot`, the column of largest residual is taken
/// next and the process stops once residuals drop below
/// `rank_rel * (largest column norm)`; without it columns are taken in order
/// and only exact zeros are skipped.
pub fn gram_schmidt_qr(a: &CMatrix, pivot: bool, rank_rel: f64) -> Qr {
    let n = a.rows();
    let m = a.cols();
    let mut work: Vec<Vec<C64>> = (0..m).map(|j| a.column(j)).collect();
    let scale = work.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut coeffs: Vec<Vec<C64>> = Vec::new();
    let mut pivots = Vec::new();
    let mut remaining: Vec<usize> = (0..m).collect();

    while basis.len() < n && !remaining.is_empty() {
        let pos = if pivot {
            let mut best = 0;
            for (p, &j) in remaining.iter().enumerate() {
                if vec_norm(&work[j]) > vec_norm(&work[remaining[best]]) {
                    best = p;
                }
            }
            best
        } else {
            0
        };
        let j = remaining.remove(pos);
        let mut row = vec![C64::new(0.0, 0.0); m];
        // second pass against the existing basis
        for (k, q) in basis.iter().enumerate() {
            let c = inner(&work[j], q);
            for (w, &qi) in work[j].iter_mut().zip(q) {
                *w -= c * qi;
            }
            coeffs[k][j] += c;
        }
        let norm = vec_norm(&work[j]);
        let negligible = if pivot { norm <= rank_rel * scale || norm == 0.0 } else { norm == 0.0 };
        if negligible {
            if pivot {
                break;
            }
            continue;
        }
        let q: Vec<C64> = work[j].iter().map(|&w| w / norm).collect();
        row[j] = C64::new(norm, 0.0);
        for &l in &remaining {
            let c = inner(&work[l], &q);
            for (w, &qi) in work[l].iter_mut().zip(&q) {
                *w -= c * qi;
            }
            row[l] = c;
        }
        basis.push(q);
        coeffs.push(row);
        pivots.push(j);
    }

    let rank = basis.len();
    let q = if rank == 0 { CMatrix::zeros(n, 0) } else { CMatrix::from_columns(&basis).expect("equal lengths") };
    let r = CMatrix::from_fn(rank, m, |k, j| coeffs[k][j]);
    Qr { q, r, pivots }
}

/// Orthonormal basis of the orthogonal complement of the columns of `q`
/// (assumed orthonormal). Standard basis vectors are added greedily by
/// largest residual, ties to the smallest index.
pub fn orthonormal_complement(q: &CMatrix) -> CMatrix {
    let n = q.rows();
    let mut basis: Vec<Vec<C64>> = (0..q.cols()).map(|j| q.column(j)).collect();
    let mut out: Vec<Vec<C64>> = Vec::new();
    while basis.len() < n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[i] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(&e, b);
                    for (x, &bi) in e.iter_mut().zip(b) {
                        *x -= c * bi;
                    }
                }
            }
            let nrm = vec_norm(&e);
            if best.as_ref().is_none_or(|(bn, _)| nrm > *bn) {
                best = Some((nrm, e));
            }
        }
        let (nrm, e) = best.expect("n > 0");
        let v: Vec<C64> = e.iter().map(|&x| x / nrm).collect();
        basis.push(v.clone());
        out.push(v);
    }
    if out.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&out).expect("equal lengths")
    }
}

/// Closest isometry to `m` in the Frobenius norm (the polar factor).
pub fn nearest_isometry(m: &CMatrix) -> Result<CMatrix> {
    nearest_isometry_with(m, Tolerances::default().rank_rel)
}

pub fn nearest_isometry_with(m: &CMatrix, rank_rel: f64) -> Result<CMatrix> {
    if m.rows() < m.cols() {
        return Err(Error::InvalidInput(format!("nearest isometry needs rows >= cols, got {}x{}", m.rows(), m.cols())));
    }
    if m.cols() == 0 {
        return Ok(m.clone());
    }
    let gram = HermitianMatrix::from_hermitian_part(&m.adjoint().matmul(m))?;
    let e = herm_eig(&gram)?;
    let smax = e.max().max(0.0).sqrt();
    let smin = e.min().max(0.0).sqrt();
    if smax == 0.0 || smin <= rank_rel * smax {
        return Err(Error::RankDeficient { ratio: if smax > 0.0 { smin / smax } else { 0.0 } });
    }
    let inv_sqrt = e.reconstruct_with(|l| 1.0 / l.sqrt());
    let mut q = m.matmul(&inv_sqrt);
    // Newton-Schulz polish toward the same polar factor.
    for _ in 0..3 {
        let qq = q.adjoint().matmul(&q);
        let defect = (&qq - &CMatrix::identity(q.cols())).max_abs();
        if defect < 1e-15 {
            break;
        }
        let corr = (&CMatrix::identity(q.cols()).scale_re(3.0) - &qq).scale_re(0.5);
        q = q.matmul(&corr);
    }
    Ok(q)
}

/// `x R^+` for an `r x m` matrix `R` of full row rank, computed through a
/// QR factorization of `R*` to avoid forming `R R*`.
pub fn right_pseudo_solve(x: &CMatrix, r: &CMatrix) -> Result<CMatrix> {
    assert_eq!(x.cols(), r.cols(), "right_pseudo_solve: column counts differ");
    let rank = r.rows();
    // R* = Q2 R2 with Q2 (m x rank) orthonormal, R2 (rank x rank) upper triangular.
    let qr = gram_schmidt_qr(&r.adjoint(), false, 0.0);
    if qr.rank() < rank {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let r2 = qr.r.select_columns(&qr.pivots);
    let y = x.matmul(&qr.q);
    // Solve M R2* = Y, i.e. R2 M* = Y*, by back substitution.
    let yt = y.adjoint();
    let mut mt = CMatrix::zeros(rank, x.rows());
    for c in 0..x.rows() {
        for i in (0..rank).rev() {
            let mut s = yt[(i, c)];
            for j in i + 1..rank {
                s -= r2[(i, j)] * mt[(j, c)];
            }
            mt[(i, c)] = s / r2[(i, i)];
        }
    }
    Ok(mt.adjoint())
}
