//! Hermitian eigensolver (cyclic complex Jacobi) and the spectral
//! utilities built on it.

use super::matrix::{CMatrix, HermitianMatrix, C64};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `V diag(f(lambda)) V*`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum())
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn herm_eig(h: &HermitianMatrix) -> Result<HermEig> {
    herm_eig_with_budget(h, Tolerances::default().jacobi_sweeps)
}

pub fn herm_eig_with_budget(h: &HermitianMatrix, max_sweeps: usize) -> Result<HermEig> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidInput("eigendecomposition of an empty matrix".into()));
    }
    let mut a = h.as_matrix().clone();
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        let mut converged = false;
        let mut off = off_diagonal_norm(&a);
        for _ in 0..max_sweeps {
            if off <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q, scale);
                }
            }
            off = off_diagonal_norm(&a);
        }
        if !converged && off > 1e-15 * scale {
            return Err(Error::NonConvergence { sweeps: max_sweeps, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    Ok(HermEig { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating entry (p, q).
///
/// The rotation is `W = diag(1, e^{-i phi}) R(theta)` restricted to the
/// (p, q) plane, where `a_pq = |a_pq| e^{i phi}`; the phase factor makes the
/// pivot real so the classical real rotation applies.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let n = a.rows();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= 1e-300 || mag <= 1e-18 * scale {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();
    // W entries
    let w_pp = C64::new(c, 0.0);
    let w_pq = C64::new(s, 0.0);
    let w_qp = -pc * s;
    let w_qq = pc * c;

    // A <- A W (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    // A <- W* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.rows() <= m.cols() { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(m) };
    let h = HermitianMatrix::from_hermitian_part(&gram).expect("Gram matrix is square");
    match herm_eig(&h) {
        Ok(e) => e.max().max(0.0).sqrt(),
        // Jacobi on a PSD Gram matrix of this size does not fail in practice;
        // fall back to the Frobenius bound rather than panicking.
        Err(_) => m.frobenius_norm(),
    }
}

/// Frobenius-nearest positive semidefinite matrix.
pub fn psd_project(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = herm_eig(h)?;
    if e.min() >= 0.0 {
        return Ok(h.clone());
    }
    HermitianMatrix::from_hermitian_part(&e.reconstruct_with(|l| l.max(0.0)))
}

/// Projection onto the PSD cone that also reports the smallest eigenvalue
/// of the input. Used by the feasibility solver to avoid a second
/// decomposition.
pub(crate) fn psd_project_with_min(h: &HermitianMatrix) -> Result<(HermitianMatrix, f64)> {
    let e = herm_eig(h)?;
    let min = e.min();
    if min >= 0.0 {
        return Ok((h.clone(), min));
    }
    Ok((HermitianMatrix::from_hermitian_part(&e.reconstruct_with(|l| l.max(0.0)))?, min))
}

/// Gram factor `F` (dim x r) with `F F* = h`, keeping eigenvalues above `rank_tol`.
///
/// Columns are `sqrt(lambda_k) v_k` in order of decreasing eigenvalue.
pub fn psd_factor(h: &HermitianMatrix, rank_tol: f64) -> Result<CMatrix> {
    let e = herm_eig(h)?;
    if e.min() < -rank_tol {
        return Err(Error::NotPsd { min_eig: e.min() });
    }
    let n = h.dim();
    let keep: Vec<usize> = (0..n).rev().filter(|&k| e.values[k] > rank_tol).collect();
    let mut f = CMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let s = e.values[k].sqrt();
        for i in 0..n {
            f[(i, c)] = e.vectors[(i, k)] * s;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn herm(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::try_from_matrix(&CMatrix::from_real_rows(rows), 0.0).unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = herm_eig(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvectors_are_permutation() {
        let e = herm_eig(&HermitianMatrix::from_real_diag(&[2.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0]);
        assert_eq!(e.vectors[(1, 0)].norm(), 1.0);
        assert_eq!(e.vectors[(0, 1)].norm(), 1.0);
        assert_eq!(e.vectors[(0, 0)].norm(), 0.0);
    }

    #[test]
    fn swap_matrix() {
        let e = herm_eig(&herm(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = CMatrix::from_rows(&[vec![c64(1.0, 0.0), c64(0.0, 1.0)], vec![c64(0.0, -1.0), c64(1.0, 0.0)]]).unwrap();
        let e = herm_eig(&HermitianMatrix::try_from_matrix(&m, 0.0).unwrap()).unwrap();
        assert!(e.values[0].abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        let back = e.reconstruct_with(|l| l);
        assert!((&back - &m).max_abs() < 1e-14);
    }

    #[test]
    fn zero_budget_reports_nonconvergence() {
        let err = herm_eig_with_budget(&herm(&[&[0.0, 1.0], &[1.0, 0.0]]), 0).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 2)), 0.0);
        let m = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((operator_norm(&m) - 2.0).abs() < 1e-12);
        let u = CMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert!((operator_norm(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psd_project_examples() {
        let p = HermitianMatrix::from_real_diag(&[1.0, 0.5]);
        assert_eq!(psd_project(&p).unwrap(), p);

        let q = psd_project(&HermitianMatrix::from_real_diag(&[3.0, -2.0])).unwrap();
        assert!((q.as_matrix() - &CMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 0.0]])).max_abs() < 1e-15);

        let r = psd_project(&herm(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        let want = CMatrix::from_real_rows(&[&[1.5, 1.5], &[1.5, 1.5]]);
        assert!((r.as_matrix() - &want).max_abs() < 1e-14);
    }

    #[test]
    fn psd_factor_examples() {
        let f = psd_factor(&HermitianMatrix::from_real_diag(&[4.0, 0.0]), 1e-12).unwrap();
        assert_eq!(f.cols(), 1);
        assert!((f[(0, 0)].norm() - 2.0).abs() < 1e-14);
        assert_eq!(f[(1, 0)].norm(), 0.0);

        let i3 = HermitianMatrix::identity(3);
        let f = psd_factor(&i3, 1e-12).unwrap();
        assert!((&f.matmul(&f.adjoint()) - i3.as_matrix()).max_abs() < 1e-14);

        let h = herm(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let f = psd_factor(&h, 1e-12).unwrap();
        assert_eq!(f.cols(), 2);
        assert!((&f.matmul(&f.adjoint()) - h.as_matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let err = psd_factor(&HermitianMatrix::from_real_diag(&[1.0, -0.1]), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }
}
