use super::matrix::{CMatrix, C64};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput(format!("LU of a non-square {}x{} matrix", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) =
                (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(Error::IllConditioned { cond: f64::INFINITY });
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, norm_one: a.norm_one() })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let lu = &self.lu;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= lu[(i, j)] * x[j];
            }
            x[i] = s / lu[(i, i)];
        }
        x
    }

    /// Solves `A* x = b`.
    pub fn solve_adjoint_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let lu = &self.lu;
        // A* = U* L* P, so solve U* y = b, L* z = y, x = P^T z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= lu[(j, i)].conj() * y[j];
            }
            y[i] = s / lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= lu[(j, i)].conj() * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(b.rows(), self.dim(), "solve: right-hand side has wrong row count");
        let mut x = CMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            x.set_column(j, &self.solve_vec(&b.column(j)));
        }
        x
    }

    /// Hager-Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            let y_norm: f64 = y.iter().map(|z| z.norm()).sum();
            if !y_norm.is_finite() {
                return f64::INFINITY;
            }
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let xi: Vec<C64> =
                y.iter().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }).collect();
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) =
                z.iter()
                    .enumerate()
                    .map(|(i, v)| (i, v.norm()))
                    .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![C64::new(0.0, 0.0); n];
            x[j] = C64::new(1.0, 0.0);
        }
        est * self.norm_one
    }
}

/// Solves `a x = b` with partial pivoting, refusing ill-conditioned systems.
pub fn solve_linear(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    solve_linear_with(a, b, Tolerances::default().max_condition)
}

pub fn solve_linear_with(a: &CMatrix, b: &CMatrix, max_condition: f64) -> Result<CMatrix> {
    if b.rows() != a.rows() {
        return Err(Error::InvalidInput(format!("right-hand side has {} rows, system has {}", b.rows(), a.rows())));
    }
    let lu = Lu::new(a)?;
    let cond = lu.condition_estimate();
    if !(cond <= max_condition) {
        return Err(Error::IllConditioned { cond });
    }
    Ok(lu.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn identity_system() {
        let b = CMatrix::from_fn(3, 2, |i, j| c64(i as f64, j as f64 - 0.5));
        let x = solve_linear(&CMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn scaled_identity() {
        let x = solve_linear(&CMatrix::identity(4).scale_re(2.0), &CMatrix::identity(4)).unwrap();
        assert!((&x - &CMatrix::identity(4).scale_re(0.5)).max_abs() == 0.0);
    }

    #[test]
    fn singular_refused() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let err = solve_linear(&a, &CMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }));
        let nearly = CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-16]]);
        assert!(solve_linear(&nearly, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn condition_estimate_diagonal() {
        let a = CMatrix::from_diag(&[c64(1.0, 0.0), c64(1e-3, 0.0), c64(0.0, 10.0)]);
        let est = Lu::new(&a).unwrap().condition_estimate();
        assert!((est - 1e4).abs() < 1e-6, "{est}");
    }

    #[test]
    fn adjoint_solve() {
        let a = CMatrix::from_rows(&[
            vec![c64(2.0, 1.0), c64(0.5, 0.0), c64(0.0, -1.0)],
            vec![c64(0.0, 0.3), c64(1.0, 0.0), c64(0.2, 0.2)],
            vec![c64(1.0, 0.0), c64(-0.4, 0.1), c64(3.0, 0.0)],
        ])
        .unwrap();
        let b = vec![c64(1.0, 0.0), c64(0.0, 2.0), c64(-1.0, 1.0)];
        let lu = Lu::new(&a).unwrap();
        let x = lu.solve_adjoint_vec(&b);
        let r = a.adjoint().mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-13);
        }
    }
}
