//! Complex Schur decomposition `A = Q T Q*` for general square matrices,
//! used for joint spectra of commuting pairs and for unitary
//! eigendecompositions.

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diagonal()
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c`, mapping (x, y) to (r, 0).
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Self { c: 1.0, s: C64::new(0.0, 0.0) };
        }
        if ax == 0.0 {
            return Self { c: 0.0, s: y.conj() / ay };
        }
        let r = ax.hypot(ay);
        let alpha = x / ax;
        Self { c: ax / r, s: alpha * y.conj() / r }
    }

    /// Rows (i, k) <- G (rows), for columns in `cols`.
    fn apply_rows(&self, m: &mut CMatrix, i: usize, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(i, j)];
            let b = m[(k, j)];
            m[(i, j)] = a * self.c + self.s * b;
            m[(k, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns (i, k) <- (columns) G*, for rows in `rows`.
    fn apply_cols(&self, m: &mut CMatrix, i: usize, k: usize, rows: std::ops::Range<usize>) {
        for r in rows {
            let a = m[(r, i)];
            let b = m[(r, k)];
            m[(r, i)] = a * self.c + b * self.s.conj();
            m[(r, k)] = -a * self.s + b * self.c;
        }
    }
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H P with P = I - 2 v v* / (v* v) acting on indices k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * f;
            }
        }
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(t, vi)| mat[(i, k + 1 + t)] * vi).sum();
                let f = dot * (2.0 / vnorm2);
                for (t, vi) in v.iter().enumerate() {
                    mat[(i, k + 1 + t)] -= f * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Complex Schur form by Hessenberg reduction and single-shift QR sweeps.
pub fn schur(a: &CMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::InvalidInput("Schur decomposition needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { q, t: h });
    }
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let max_iter = 100 * n;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;

    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let thresh = eps * if diag > 0.0 { diag } else { norm };
            if sub <= thresh {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            let off = h[(hi, hi - 1)].norm();
            return Err(Error::NonConvergence { sweeps: total, off });
        }

        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // implicit single-shift sweep on lo..=hi
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let g = Givens::new(x, y);
            let col_start = if k > lo { k - 1 } else { k };
            g.apply_rows(&mut h, k, k + 1, col_start..n);
            let row_end = (k + 3).min(hi + 1);
            g.apply_cols(&mut h, k, k + 1, 0..row_end);
            g.apply_cols(&mut q, k, k + 1, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Schur { q, t: h })
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution, unit
/// 2-norm columns. Near-zero denominators are replaced by a small multiple
/// of the norm, so defective input yields nearly parallel columns.
pub fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let small = f64::EPSILON * t.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lk = t[(k, k)];
        let mut col = vec![C64::new(0.0, 0.0); n];
        col[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * col[j]).sum();
            let mut den = t[(i, i)] - lk;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            col[i] = -s / den;
        }
        let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, z) in col.iter().enumerate() {
            y[(i, k)] = z / nrm;
        }
    }
    y
}

/// Eigendecomposition of a normal matrix, `A = V diag(values) V*` with V
/// unitary. Fails if the Schur form is not diagonal to `tol`.
pub fn normal_eig(a: &CMatrix, tol: f64) -> Result<(Vec<C64>, CMatrix)> {
    let s = schur(a)?;
    let n = a.rows();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            off = off.max(s.t[(i, j)].norm());
        }
    }
    if off > tol * a.frobenius_norm().max(1.0) {
        return Err(Error::InvalidInput(format!("matrix is not normal (Schur off-diagonal {off:e})")));
    }
    Ok((s.t.diagonal(), s.q))
}
