//! Spectral-domain experiments for commuting pairs and the diagonal
//! defining function.
//!
//! G is a spectral domain for a commuting pair `S` exactly when
//! `||Phi_omega(S)|| <= 1` for every unimodular `omega`, where
//! `Phi_omega(S) = (2 omega S2 - S1)(2 - omega S1)^{-1}`. The check here
//! samples `omega` on an equispaced grid, so it under-approximates the sup.

use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{f_s_eval, membership_with, GPoint, Region};
use crate::numerics::{operator_norm, schur, triangular_eigenvectors, CMatrix, Lu, C64};
use crate::realize::RealizedFunction;

pub const DEFAULT_GRID: usize = 1024;

/// Eigenvector condition number above which a pair counts as defective.
const MAX_EIGVEC_COND: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutingPair {
    pub s1: CMatrix,
    pub s2: CMatrix,
    pub commutator_norm: f64,
}

impl CommutingPair {
    pub fn new(s1: CMatrix, s2: CMatrix) -> Result<Self> {
        if !s1.is_square() || s1.rows() != s2.rows() || s1.cols() != s2.cols() {
            return Err(Error::InvalidInput("pair must consist of square matrices of equal size".into()));
        }
        if !s1.is_finite() || !s2.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        let commutator_norm = operator_norm(&(&s1.matmul(&s2) - &s2.matmul(&s1)));
        let scale = (operator_norm(&s1) * operator_norm(&s2)).max(1.0);
        if commutator_norm > 1e-10 * scale {
            return Err(Error::NotCommuting { norm: commutator_norm });
        }
        Ok(Self { s1, s2, commutator_norm })
    }

    pub fn dim(&self) -> usize {
        self.s1.rows()
    }
}

/// Simultaneous Schur form `S_k = Q T_k Q*` with joint eigenvalues on the diagonals.
#[derive(Debug, Clone)]
pub struct JointSchur {
    pub q: CMatrix,
    pub t1: CMatrix,
    pub t2: CMatrix,
    /// Upper triangular Schur factor of the generic combination `S1 + c S2`.
    pub tk: CMatrix,
    pub points: Vec<GPoint>,
}

/// Triangularizes both matrices through the Schur form of `S1 + c S2` for
/// a few fixed generic `c`, accepting the first `c` that triangularizes both.
pub fn joint_schur(p: &CommutingPair) -> Result<JointSchur> {
    const CANDIDATES: [(f64, f64); 4] =
        [(0.618_034, 0.381_966), (-1.324_718, 0.754_878), (0.271_828, -1.395_112), (2.236_068, 0.577_216)];
    let n = p.dim();
    let scale = p.s1.frobenius_norm().max(p.s2.frobenius_norm()).max(1.0);
    let mut worst = f64::INFINITY;
    for (re, im) in CANDIDATES {
        let c = C64::new(re, im);
        let k = &p.s1 + &p.s2.scale(c);
        let sch = schur(&k)?;
        let qh = sch.q.adjoint();
        let t1 = qh.matmul(&p.s1).matmul(&sch.q);
        let t2 = qh.matmul(&p.s2).matmul(&sch.q);
        let mut lower = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                lower = lower.max(t1[(i, j)].norm()).max(t2[(i, j)].norm());
            }
        }
        if lower <= 1e-8 * scale {
            let points = (0..n).map(|i| GPoint::new(t1[(i, i)], t2[(i, i)])).collect();
            return Ok(JointSchur { q: sch.q, t1, t2, tk: sch.t, points });
        }
        worst = worst.min(lower);
    }
    Err(Error::NonConvergence { sweeps: CANDIDATES.len(), off: worst })
}

pub fn joint_spectrum(p: &CommutingPair) -> Result<Vec<GPoint>> {
    Ok(joint_schur(p)?.points)
}

/// Joint eigenvectors `V` (columns) and eigenvalues, refusing defective pairs.
pub fn joint_diagonalize(p: &CommutingPair) -> Result<(CMatrix, Vec<GPoint>)> {
    let js = joint_schur(p)?;
    let v = js.q.matmul(&triangular_eigenvectors(&js.tk));
    let cond = Lu::new(&v).map(|lu| lu.condition_estimate()).unwrap_or(f64::INFINITY);
    if !(cond <= MAX_EIGVEC_COND) {
        return Err(Error::NotDiagonalizable { cond });
    }
    Ok((v, js.points))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainCheck {
    pub max_norm: f64,
    pub argmax: C64,
    pub grid: usize,
}

/// `Phi_omega(S)`
pub fn phi_omega_pair(p: &CommutingPair, omega: C64, max_condition: f64) -> Result<CMatrix> {
    let den = p.s1.scale(-omega).shift(C64::new(2.0, 0.0));
    let num = &p.s2.scale(omega * 2.0) - &p.s1;
    let lu = Lu::new(&den).map_err(|_| Error::SingularResolvent { omega: omega.to_string() })?;
    if !(lu.condition_estimate() <= max_condition) {
        return Err(Error::SingularResolvent { omega: omega.to_string() });
    }
    Ok(lu.solve(&num))
}

/// Largest `||Phi_omega(S)||` over `grid` equispaced points of the circle.
pub fn spectral_domain_check(p: &CommutingPair, grid: usize) -> Result<DomainCheck> {
    spectral_domain_check_with(p, grid, &Tolerances::default())
}

pub fn spectral_domain_check_with(p: &CommutingPair, grid: usize, tol: &Tolerances) -> Result<DomainCheck> {
    if grid == 0 {
        return Err(Error::InvalidInput("grid must have at least one point".into()));
    }
    for (k, s) in joint_spectrum(p)?.iter().enumerate() {
        let m = membership_with(s, tol.boundary);
        if m.region != Region::Interior {
            return Err(Error::OutOfDomain(format!("joint eigenvalue {k} = ({}, {}) is {:?}", s.s1, s.s2, m.region)));
        }
    }
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
    let (max_norm, idx) = (0..grid)
        .into_par_iter()
        .map(|k| phi_omega_pair(p, omega(k), tol.max_condition).map(|m| (operator_norm(&m), k)))
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok(DomainCheck { max_norm, argmax: omega(idx), grid })
}

/// `phi(S) = V diag(phi(sigma_j)) V^{-1}` for a diagonalizable pair.
pub fn evaluate_on_pair(f: &RealizedFunction, p: &CommutingPair) -> Result<CMatrix> {
    let (v, points) = joint_diagonalize(p)?;
    let vals: Vec<C64> = points.iter().map(|s| f.evaluate(s)).collect::<Result<_>>()?;
    let vd = CMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * vals[j]);
    let vinv = Lu::new(&v)?.solve(&CMatrix::identity(v.rows()));
    Ok(vd.matmul(&vinv))
}

/// Truncation of `F(s) = diag_n f_s(lambda_n)` together with a boundary direction `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalDefiningFunction {
    pub lambda_seq: Vec<C64>,
    pub omega: C64,
}

impl DiagonalDefiningFunction {
    pub fn new(lambda_seq: Vec<C64>, omega: C64) -> Result<Self> {
        if lambda_seq.is_empty() {
            return Err(Error::InvalidInput("lambda sequence is empty".into()));
        }
        if let Some(l) = lambda_seq.iter().find(|l| !(l.norm() < 1.0)) {
            return Err(Error::InvalidInput(format!("lambda = {l} is not in the open disc")));
        }
        if (omega.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("omega = {omega} is not unimodular")));
        }
        Ok(Self { lambda_seq, omega })
    }

    /// Points `omega (1 - g)` with `g` halving from 1/2 down to `10 (1 - r)^2`,
    /// plus a coarse polar grid of the disc.
    pub fn adaptive(omega: C64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!("r = {r} is not in (0, 1)")));
        }
        let finest = (10.0 * (1.0 - r) * (1.0 - r)).min(0.5);
        let mut seq = Vec::new();
        let mut g = 0.5;
        while g > finest {
            seq.push(omega * (1.0 - g));
            g *= 0.5;
        }
        seq.push(omega * (1.0 - finest));
        for i in 0..4 {
            for k in 0..16 {
                let rad = 0.25 * i as f64;
                seq.push(C64::from_polar(rad, 2.0 * std::f64::consts::PI * k as f64 / 16.0));
                if i == 0 {
                    break;
                }
            }
        }
        Self::new(seq, omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscontinuityReport {
    pub r: f64,
    /// `max_n |f_p(lambda_n) - f_{p_r}(lambda_n)|` with `p = (2 conj(omega), conj(omega)^2)`
    /// and `p_r = (2 r conj(omega), r conj(omega)^2)`.
    pub direct: f64,
    /// `(1 - r) max_n 1 / |1 - r lambda_n conj(omega)|`
    pub closed_form: f64,
}

impl DiscontinuityReport {
    pub fn value(&self) -> f64 {
        self.direct
    }

    pub fn agreement(&self) -> f64 {
        (self.direct - self.closed_form).abs()
    }
}

/// Norm of `F(p) - F(p_r)` for the truncated diagonal operator. Since
/// `f_p` is identically `-conj(omega)`, the difference at `lambda` is
/// `-conj(omega) (1 - r) / (1 - r lambda conj(omega))`.
pub fn discontinuity_demo(d: &DiagonalDefiningFunction, r: f64) -> Result<DiscontinuityReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("r = {r} is not in (0, 1)")));
    }
    let wb = d.omega.conj();
    let p = GPoint::new(wb * 2.0, wb * wb);
    let pr = GPoint::new(wb * (2.0 * r), wb * wb * r);
    let mut direct = 0.0f64;
    let mut closed_form = 0.0f64;
    for &l in &d.lambda_seq {
        direct = direct.max((f_s_eval(&p, l)? - f_s_eval(&pr, l)?).norm());
        closed_form = closed_form.max((1.0 - r) / (C64::new(1.0, 0.0) - l * wb * r).norm());
    }
    Ok(DiscontinuityReport { r, direct, closed_form })
}

/// `(r, value)` for each `r`, each on its own adaptive grid.
pub fn discontinuity_sweep(omega: C64, rs: &[f64]) -> Result<Vec<DiscontinuityReport>> {
    rs.iter().map(|&r| discontinuity_demo(&DiagonalDefiningFunction::adaptive(omega, r)?, r)).collect()
}
