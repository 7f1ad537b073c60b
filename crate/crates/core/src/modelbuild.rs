//! From a bidisc Pick certificate to a model on G.
//!
//! The certificate factors as Gramians of vectors `u1_k, u2_k` indexed by
//! the lifted nodes. Stacking `v_k = (u1_k, u2_{sigma k})` and matching
//!
//! ```text
//! v_k - v_{sigma k}  ->  l1_k v_k - l2_k v_{sigma k}
//! ```
//!
//! gives an isometry, extended to a unitary `U`. Then
//! `x(s_j) = (U - l2_k)^{-1} v_k` for either fiber point `k` of `s_j`.
//! With `T = U*` the model vector at `s_j` is `(1 - s1_j T / 2) x(s_j)`, and
//!
//! ```text
//! 1 - conj(w_i) w_j = <(1 - (s_i)_T* (s_j)_T) v_j, v_i>.
//! ```

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{phi_omega, pi_map, s_operator_unchecked, GPoint};
use crate::lurking;
use crate::numerics::{
    inner, isometry_defect, normal_eig, operator_norm, orthonormal_complement, psd_factor, solve_linear, vec_norm,
    CMatrix, C64,
};
use crate::pick::{LiftedProblem, PickCertificate};

/// Model vectors on the bidisc; column `k` of `u1`/`u2` belongs to lifted node `k`.
#[derive(Debug, Clone)]
pub struct BidiscModel {
    pub lifted: LiftedProblem,
    pub u1: CMatrix,
    pub u2: CMatrix,
}

impl BidiscModel {
    /// Max violation of
    /// `1 - conj(w_i) w_j = c1_ij <u1_j, u1_i> + c2_ij <u2_j, u2_i>`.
    pub fn residual(&self) -> f64 {
        let lp = &self.lifted;
        let g1 = self.u1.adjoint().matmul(&self.u1);
        let g2 = self.u2.adjoint().matmul(&self.u2);
        let mut res = 0.0f64;
        for i in 0..lp.len() {
            for j in 0..lp.len() {
                // g[(i, j)] = <u_j, u_i>
                let rhs = lp.coefficient(0, i, j) * g1[(i, j)] + lp.coefficient(1, i, j) * g2[(i, j)];
                res = res.max((lp.rhs(i, j) - rhs).norm());
            }
        }
        res
    }
}

/// Finite model on G: unitary `t` and one vector per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GModel {
    pub dim: usize,
    pub t: CMatrix,
    pub nodes: Vec<GPoint>,
    pub v: Vec<Vec<C64>>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizeReport {
    /// Mismatch between the Gramians of the differences and the weighted differences.
    pub gram_mismatch: f64,
    /// `max |L x - y|` over the matched pairs.
    pub fit_residual: f64,
    /// `max | |L q| - 1 |` over an orthonormal basis `q` of the domain of `L`.
    pub isometry_defect: f64,
    pub unitarity_defect: f64,
    /// Disagreement of `x(s_j)` computed from the two fiber points.
    pub fiber_mismatch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GModelReport {
    pub residual: f64,
    pub worst: (usize, usize),
    pub pass: bool,
}

/// Factors `a1 = U1* U1`, `a2 = U2* U2` column-wise.
pub fn bidisc_model_from_certificate(lp: &LiftedProblem, c: &PickCertificate) -> Result<BidiscModel> {
    bidisc_model_with(lp, c, &Tolerances::default())
}

pub fn bidisc_model_with(lp: &LiftedProblem, c: &PickCertificate, tol: &Tolerances) -> Result<BidiscModel> {
    let m = lp.len();
    if c.a1.dim() != m || c.a2.dim() != m {
        return Err(Error::InvalidInput("certificate and lifted problem differ in size".into()));
    }
    // negative eigenvalues at solver accuracy are dropped, not refused
    let rank_tol = tol.rank_rel * c.a1.as_matrix().max_abs().max(c.a2.as_matrix().max_abs());
    let factor = |a| -> Result<CMatrix> {
        let f = psd_factor(a, rank_tol)?;
        // keep at least one coordinate so the model space is never empty
        Ok(if f.cols() == 0 { CMatrix::zeros(1, m) } else { f.adjoint() })
    };
    Ok(BidiscModel { lifted: lp.clone(), u1: factor(&c.a1)?, u2: factor(&c.a2)? })
}

pub fn symmetrize(bm: &BidiscModel) -> Result<GModel> {
    symmetrize_with_report(bm, &Tolerances::default()).map(|(gm, _)| gm)
}

pub fn symmetrize_with_report(bm: &BidiscModel, tol: &Tolerances) -> Result<(GModel, SymmetrizeReport)> {
    let lp = &bm.lifted;
    let m = lp.len();
    let sigma = lp.sigma_index()?;
    for (k, &l) in sigma.iter().enumerate() {
        if (lp.targets[k] - lp.targets[l]).norm() > 1e-12 {
            return Err(Error::InvalidInput(format!("targets differ across the fiber of lifted node {k}")));
        }
    }
    let r1 = bm.u1.rows();
    let n = r1 + bm.u2.rows();
    let v: Vec<Vec<C64>> = (0..m)
        .map(|k| {
            let mut x = bm.u1.column(k);
            x.extend(bm.u2.column(sigma[k]));
            x
        })
        .collect();

    let d = CMatrix::from_fn(n, m, |i, k| v[k][i] - v[sigma[k]][i]);
    let e = CMatrix::from_fn(n, m, |i, k| lp.nodes[k].l1 * v[k][i] - lp.nodes[k].l2 * v[sigma[k]][i]);
    let fit = lurking::fit(&d, &e, tol.rank_rel, f64::INFINITY)?;
    if fit.gram_mismatch > tol.gram_tol {
        return Err(Error::SymmetrizationFailed { mismatch: fit.gram_mismatch });
    }
    let isometry_defect_l =
        fit.l.matmul(&fit.domain_basis).column_norms().iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);

    let pd = orthonormal_complement(&fit.domain_basis);
    let pe = orthonormal_complement(&fit.range_basis);
    let u = &fit.l + &pe.matmul(&pd.adjoint());
    let unitarity_defect = isometry_defect(&u);
    if unitarity_defect > tol.unitary_tol {
        return Err(Error::NotUnitary { defect: unitarity_defect });
    }

    let resolvent = |z: C64, x: &[C64]| -> Result<Vec<C64>> {
        Ok(solve_linear(&u.shift(-z), &CMatrix::column_vector(x))?.column(0))
    };
    let mut w = Vec::with_capacity(m);
    let mut fiber_mismatch = 0.0f64;
    for k in 0..m {
        let wk = resolvent(lp.nodes[k].l2, &v[k])?;
        let alt = resolvent(lp.nodes[k].l1, &v[sigma[k]])?;
        let diff: Vec<C64> = wk.iter().zip(&alt).map(|(a, b)| a - b).collect();
        fiber_mismatch = fiber_mismatch.max(vec_norm(&diff));
        w.push(wk);
    }
    if fiber_mismatch > tol.fiber_tol {
        return Err(Error::SymmetrizationFailed { mismatch: fiber_mismatch });
    }

    // Expanding the averaged model in w gives the kernel
    // 1 - conj(t2) s2 - (conj(t1) - s1 conj(t2)) U / 2 - (s1 - conj(t1) s2) U* / 2,
    // which factors as (1 - t_T* s_T) with T = U*, not U.
    let t = u.adjoint();
    let sources = lp.source_count();
    let mut nodes = Vec::with_capacity(sources);
    let mut vectors = Vec::with_capacity(sources);
    let mut targets = Vec::with_capacity(sources);
    for j in 0..sources {
        let k = lp
            .origin
            .iter()
            .position(|&o| o == j)
            .ok_or_else(|| Error::InvalidInput(format!("source node {j} has no lifted node")))?;
        let s = pi_map(&lp.nodes[k]);
        let op = t.scale(-s.s1 * 0.5).shift(C64::new(1.0, 0.0));
        vectors.push(op.mul_vec(&w[k]));
        nodes.push(s);
        targets.push(lp.targets[k]);
    }
    let mut gm = GModel { dim: n, t, nodes, v: vectors, residual: 0.0 };
    gm.residual = verify_gmodel(&gm, &targets, tol.gram_tol)?.residual;
    let report = SymmetrizeReport {
        gram_mismatch: fit.gram_mismatch,
        fit_residual: fit.fit_residual,
        isometry_defect: isometry_defect_l,
        unitarity_defect,
        fiber_mismatch,
    };
    Ok((gm, report))
}

/// Max over node pairs of `|1 - conj(w_i) w_j - <(1 - (s_i)_T* (s_j)_T) v_j, v_i>|`.
pub fn verify_gmodel(gm: &GModel, targets: &[C64], tol: f64) -> Result<GModelReport> {
    let n = gm.nodes.len();
    if targets.len() != n || gm.v.len() != n || gm.t.rows() != gm.dim || gm.t.cols() != gm.dim {
        return Err(Error::InvalidInput("model dimensions are inconsistent".into()));
    }
    if gm.v.iter().any(|x| x.len() != gm.dim) {
        return Err(Error::InvalidInput("model vector has the wrong length".into()));
    }
    // (s_j)_T v_j
    let sv: Vec<Vec<C64>> = gm
        .nodes
        .iter()
        .zip(&gm.v)
        .map(|(s, v)| Ok(s_operator_unchecked(s, &gm.t)?.mul_vec(v)))
        .collect::<Result<_>>()?;
    let mut residual = 0.0f64;
    let mut worst = (0, 0);
    for i in 0..n {
        for j in 0..n {
            let lhs = C64::new(1.0, 0.0) - targets[i].conj() * targets[j];
            let rhs = inner(&gm.v[j], &gm.v[i]) - inner(&sv[j], &sv[i]);
            let r = (lhs - rhs).norm();
            if r > residual {
                residual = r;
                worst = (i, j);
            }
        }
    }
    Ok(GModelReport { residual, worst, pass: residual <= tol })
}

/// Spectral resolution `T = sum_k omega_k E_k` of a unitary matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub operator: CMatrix,
    pub eigenvalues: Vec<C64>,
    pub projections: Vec<CMatrix>,
}

pub fn spectral_decompose(t: &CMatrix) -> Result<SpectralDecomposition> {
    spectral_decompose_with(t, &Tolerances::default())
}

pub fn spectral_decompose_with(t: &CMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    if !t.is_square() {
        return Err(Error::InvalidInput("operator must be square".into()));
    }
    let defect = isometry_defect(t);
    if !(defect <= tol.unitary_tol) {
        return Err(Error::NotUnitary { defect });
    }
    let (values, vecs) = normal_eig(t, 1e-8)?;
    let n = values.len();

    // single-linkage clustering of eigenvalues closer than the gap
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= tol.cluster_gap {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let mut eigenvalues = Vec::new();
    let mut projections = Vec::new();
    let mut seen = Vec::new();
    for i in 0..n {
        if seen.contains(&label[i]) {
            continue;
        }
        seen.push(label[i]);
        let members: Vec<usize> = (0..n).filter(|&j| label[j] == label[i]).collect();
        let mean: C64 = members.iter().map(|&j| values[j]).sum::<C64>() / members.len() as f64;
        eigenvalues.push(mean / mean.norm());
        let vk = vecs.select_columns(&members);
        projections.push(vk.matmul(&vk.adjoint()));
    }
    Ok(SpectralDecomposition { operator: t.clone(), eigenvalues, projections })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.operator.rows()
    }

    /// `sum_k f(omega_k) E_k`
    pub fn apply(&self, f: impl Fn(C64) -> Result<C64>) -> Result<CMatrix> {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (w, e) in self.eigenvalues.iter().zip(&self.projections) {
            out = &out + &e.scale(f(*w)?);
        }
        Ok(out)
    }

    /// `|| s_T - sum_k Phi_{omega_k}(s) E_k ||`
    pub fn mapping_defect(&self, s: &GPoint) -> Result<f64> {
        let st = s_operator_unchecked(s, &self.operator)?;
        let sum = self.apply(|w| phi_omega(w, s))?;
        Ok(operator_norm(&(&st - &sum)))
    }

    /// `|| (1 - t_T* s_T) - sum_k (1 - conj(Phi_{omega_k}(t)) Phi_{omega_k}(s)) E_k ||`
    pub fn identity_check(&self, s: &GPoint, t: &GPoint) -> Result<f64> {
        let n = self.dim();
        let st = s_operator_unchecked(s, &self.operator)?;
        let tt = s_operator_unchecked(t, &self.operator)?;
        let lhs = &CMatrix::identity(n) - &tt.adjoint().matmul(&st);
        let rhs = self.apply(|w| Ok(C64::new(1.0, 0.0) - phi_omega(w, t)?.conj() * phi_omega(w, s)?))?;
        Ok(operator_norm(&(&lhs - &rhs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, HermitianMatrix};
    use crate::pick::{lift_problem, solve_feasibility, solve_n1_closed_form, PickProblem, SolverSettings};
    use crate::sampling::{interior_point, random_unitary, rng};

    fn single(s: GPoint, w: C64) -> (LiftedProblem, PickCertificate) {
        let lp = lift_problem(&PickProblem { nodes: vec![s], targets: vec![w] }).unwrap();
        let c = solve_n1_closed_form(&lp).unwrap();
        (lp, c)
    }

    #[test]
    fn scalar_factorization() {
        let (lp, c) = single(GPoint::real(0.0, 0.0), c64(0.0, 0.0));
        let bm = bidisc_model_from_certificate(&lp, &c).unwrap();
        assert_eq!((bm.u1.rows(), bm.u1.cols()), (1, 1));
        assert!((bm.u1[(0, 0)].norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((bm.u2[(0, 0)].norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(bm.residual() < 1e-15);
    }

    #[test]
    fn zero_targets_diagonal_identity() {
        let nodes = vec![GPoint::real(0.3, 0.0), GPoint::new(c64(0.1, 0.4), c64(-0.2, 0.05))];
        let lp = lift_problem(&PickProblem { nodes, targets: vec![c64(0.0, 0.0); 2] }).unwrap();
        let out = solve_feasibility(&lp, &SolverSettings::default()).unwrap();
        let bm = bidisc_model_from_certificate(&lp, out.certificate().unwrap()).unwrap();
        for k in 0..lp.len() {
            let d = lp.coefficient(0, k, k).re * vec_norm(&bm.u1.column(k)).powi(2)
                + lp.coefficient(1, k, k).re * vec_norm(&bm.u2.column(k)).powi(2);
            assert!((d - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn single_node_at_origin() {
        let w = 0.6;
        let (lp, c) = single(GPoint::real(0.0, 0.0), c64(w, 0.0));
        let bm = bidisc_model_from_certificate(&lp, &c).unwrap();
        let (gm, rep) = symmetrize_with_report(&bm, &Tolerances::default()).unwrap();
        assert!((vec_norm(&gm.v[0]).powi(2) - (1.0 - w * w)).abs() < 1e-14);
        assert!(gm.residual < 1e-14);
        assert_eq!(rep.gram_mismatch, 0.0);
        assert!(verify_gmodel(&gm, &[c64(w, 0.0)], 0.0).unwrap().residual < 1e-14);
    }

    #[test]
    fn single_node_two_point_fiber() {
        let (lp, c) = single(GPoint::new(c64(0.5, 0.3), c64(0.02, 0.1)), c64(0.1, -0.4));
        let bm = bidisc_model_from_certificate(&lp, &c).unwrap();
        let (gm, rep) = symmetrize_with_report(&bm, &Tolerances::default()).unwrap();
        assert!(gm.residual < 1e-10, "{}", gm.residual);
        assert!(rep.isometry_defect < 1e-8 && rep.unitarity_defect < 1e-10 && rep.fiber_mismatch < 1e-7);
    }

    #[test]
    fn pipeline_three_nodes() {
        let mut r = rng(21);
        let nodes: Vec<GPoint> = (0..3).map(|_| interior_point(&mut r, 0.8)).collect();
        let targets = vec![c64(0.1, 0.05), c64(-0.05, 0.1), c64(0.0, -0.1)];
        let lp = lift_problem(&PickProblem { nodes, targets: targets.clone() }).unwrap();
        let out = solve_feasibility(&lp, &SolverSettings::default()).unwrap();
        let bm = bidisc_model_from_certificate(&lp, out.certificate().expect("feasible")).unwrap();
        assert!(bm.residual() <= 1e-8);
        let (gm, rep) = symmetrize_with_report(&bm, &Tolerances::default()).unwrap();
        assert!(gm.residual <= 1e-6, "{}", gm.residual);
        assert!(rep.unitarity_defect <= 1e-10);
        assert!(verify_gmodel(&gm, &targets, 1e-6).unwrap().pass);

        let mut bad = gm.clone();
        for x in bad.v[1].iter_mut() {
            *x *= 2.0;
        }
        let rep = verify_gmodel(&bad, &targets, 1e-6).unwrap();
        assert!(!rep.pass && rep.residual > 0.1);
    }

    #[test]
    fn gramian_brute_force_small() {
        // both Gramians of the symmetrization recomputed entry by entry from u1, u2
        let mut r = rng(4);
        let nodes: Vec<GPoint> = (0..2).map(|_| interior_point(&mut r, 0.7)).collect();
        let lp = lift_problem(&PickProblem { nodes, targets: vec![c64(0.2, 0.0), c64(0.0, 0.1)] }).unwrap();
        let out = solve_feasibility(&lp, &SolverSettings::default()).unwrap();
        let bm = bidisc_model_from_certificate(&lp, out.certificate().unwrap()).unwrap();
        let sigma = lp.sigma_index().unwrap();
        let g1 = |a: usize, b: usize| inner(&bm.u1.column(a), &bm.u1.column(b));
        let g2 = |a: usize, b: usize| inner(&bm.u2.column(a), &bm.u2.column(b));
        // <v_a, v_b> = <u1_a, u1_b> + <u2_sa, u2_sb>
        let gv = |a: usize, b: usize| g1(a, b) + g2(sigma[a], sigma[b]);
        let m = lp.len();
        assert!(m <= 4);
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let (sa, sb) = (sigma[a], sigma[b]);
                let lhs = gv(a, b) - gv(a, sb) - gv(sa, b) + gv(sa, sb);
                let (la, lb) = (lp.nodes[a], lp.nodes[b]);
                let rhs = la.l1 * lb.l1.conj() * gv(a, b)
                    - la.l1 * lb.l2.conj() * gv(a, sb)
                    - la.l2 * lb.l1.conj() * gv(sa, b)
                    + la.l2 * lb.l2.conj() * gv(sa, sb);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn bad_certificate_breaks_symmetrization() {
        let (lp, mut c) = single(GPoint::real(0.9, 0.2), c64(0.0, 0.0));
        c.a1 = HermitianMatrix::identity(2);
        let bm = bidisc_model_from_certificate(&lp, &c).unwrap();
        assert!(matches!(symmetrize(&bm), Err(Error::SymmetrizationFailed { .. })));
    }

    #[test]
    fn spectral_examples() {
        let w = C64::from_polar(1.0, 0.4);
        let sd = spectral_decompose(&CMatrix::from_diag(&[w])).unwrap();
        let s = GPoint::new(c64(0.3, 0.1), c64(0.0, 0.2));
        let t = GPoint::real(-0.5, 0.04);
        assert!(sd.identity_check(&s, &t).unwrap() < 1e-15);

        let sd = spectral_decompose(&CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        let mut r = rng(8);
        for _ in 0..20 {
            let s = interior_point(&mut r, 0.95);
            let t = interior_point(&mut r, 0.95);
            assert!(sd.identity_check(&s, &t).unwrap() <= 1e-12);
        }

        let u = random_unitary(&mut r, 6);
        let sd = spectral_decompose(&u).unwrap();
        let sum = sd.projections.iter().fold(CMatrix::zeros(6, 6), |acc, e| &acc + e);
        assert!((&sum - &CMatrix::identity(6)).max_abs() < 1e-10);
        for e in &sd.projections {
            assert!((&e.matmul(e) - e).max_abs() < 1e-10);
        }
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let s = interior_point(&mut r, 0.95);
            let t = interior_point(&mut r, 0.95);
            worst = worst.max(sd.identity_check(&s, &t).unwrap());
            worst = worst.max(sd.mapping_defect(&s).unwrap());
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn repeated_eigenvalues_cluster() {
        let mut r = rng(2);
        let v = random_unitary(&mut r, 4);
        let d = CMatrix::from_diag(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0), c64(1.0, 0.0)]);
        let u = v.matmul(&d).matmul(&v.adjoint());
        let sd = spectral_decompose(&u).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        let traces: Vec<f64> = sd.projections.iter().map(|e| e.trace().re.round()).collect();
        assert!(traces.contains(&3.0) && traces.contains(&1.0));
    }

    #[test]
    fn non_unitary_refused() {
        let t = CMatrix::identity(2).scale_re(0.5);
        assert!(matches!(spectral_decompose(&t), Err(Error::NotUnitary { .. })));
    }
}
