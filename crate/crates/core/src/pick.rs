//! Interpolation problems on G, their lift to the bidisc, and the bidisc
//! Pick criterion
//!
//! ```text
//! 1 - conj(w_i) w_j = a1_ij (1 - conj(l1_i) l1_j) + a2_ij (1 - conj(l2_i) l2_j)
//! ```
//!
//! solved as a convex feasibility problem over pairs of PSD matrices.
//!
//! The solver runs Dykstra's alternating projections between the affine set
//! cut out by the equations above and the product of two PSD cones.
//! Infeasibility is reported when the iteration stalls at a positive
//! distance between the two sets; this is a numerical diagnosis, not a dual
//! certificate.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{fiber, membership_with, BidiscPoint, GPoint, Region};
use crate::numerics::{herm_eig, psd_project_with_min, HermitianMatrix, C64};

/// Distinct nodes of G with targets in the closed disc.
#[derive(Debug, Clone, PartialEq)]
pub struct PickProblem {
    pub nodes: Vec<GPoint>,
    pub targets: Vec<C64>,
}

impl PickProblem {
    pub fn new(nodes: Vec<GPoint>, targets: Vec<C64>) -> Result<Self> {
        let p = Self { nodes, targets };
        p.validate(&Tolerances::default())?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidInput("problem has no nodes".into()));
        }
        if self.nodes.len() != self.targets.len() {
            return Err(Error::InvalidInput(format!("{} nodes but {} targets", self.nodes.len(), self.targets.len())));
        }
        for (j, w) in self.targets.iter().enumerate() {
            if !(w.norm() <= 1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!("target {j} = {w} lies outside the closed disc")));
            }
        }
        for (j, s) in self.nodes.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidInput(format!("node {j} is not finite")));
            }
            let m = membership_with(s, tol.boundary);
            if m.region != Region::Interior {
                return Err(Error::OutOfDomain(format!("node {j} = ({}, {}) is {:?}", s.s1, s.s2, m.region)));
            }
        }
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                let separation = self.nodes[i].distance(&self.nodes[j]);
                if separation <= tol.node_separation {
                    return Err(Error::DuplicateNodes { i, j, separation });
                }
            }
        }
        Ok(())
    }
}

/// The problem pulled back to the bidisc along the symmetrization map.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedProblem {
    pub nodes: Vec<BidiscPoint>,
    pub targets: Vec<C64>,
    /// Index of the source node each lifted node maps to.
    pub origin: Vec<usize>,
}

impl LiftedProblem {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn source_count(&self) -> usize {
        self.origin.iter().max().map_or(0, |&j| j + 1)
    }

    /// For each lifted node, the index of its transpose in the node list
    /// (itself for a double root). Fails if the node set is not closed under
    /// transposition.
    pub fn sigma_index(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.len());
        for (k, p) in self.nodes.iter().enumerate() {
            let t = p.sigma();
            let found = (0..self.len()).find(|&l| {
                self.origin[l] == self.origin[k]
                    && (self.nodes[l].l1 - t.l1).norm() <= 1e-12
                    && (self.nodes[l].l2 - t.l2).norm() <= 1e-12
            });
            match found {
                Some(l) => out.push(l),
                None => {
                    return Err(Error::InvalidInput(format!("lifted node {k} has no transposed partner")));
                }
            }
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let m = self.len();
        if m == 0 || self.targets.len() != m || self.origin.len() != m {
            return Err(Error::InvalidInput("lifted problem has inconsistent lengths".into()));
        }
        for (k, p) in self.nodes.iter().enumerate() {
            if !p.is_interior() {
                return Err(Error::InvalidInput(format!("lifted node {k} is not inside the bidisc")));
            }
            if !(self.targets[k].norm() <= 1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!("lifted target {k} lies outside the closed disc")));
            }
        }
        Ok(())
    }

    /// Kernel coefficient `1 - conj(l^k_i) l^k_j` for coordinate `k` (0 or 1).
    pub fn coefficient(&self, k: usize, i: usize, j: usize) -> C64 {
        C64::new(1.0, 0.0) - self.nodes[i].coord(k).conj() * self.nodes[j].coord(k)
    }

    /// `1 - conj(w_i) w_j`
    pub fn rhs(&self, i: usize, j: usize) -> C64 {
        C64::new(1.0, 0.0) - self.targets[i].conj() * self.targets[j]
    }
}

/// Lifts each node to its fiber, keeping node order and fiber order.
pub fn lift_problem(p: &PickProblem) -> Result<LiftedProblem> {
    lift_problem_with(p, &Tolerances::default())
}

pub fn lift_problem_with(p: &PickProblem, tol: &Tolerances) -> Result<LiftedProblem> {
    p.validate(tol)?;
    let mut nodes = Vec::new();
    let mut targets = Vec::new();
    let mut origin = Vec::new();
    for (j, (s, &w)) in p.nodes.iter().zip(&p.targets).enumerate() {
        for mu in fiber(s).points {
            nodes.push(mu);
            targets.push(w);
            origin.push(j);
        }
    }
    Ok(LiftedProblem { nodes, targets, origin })
}

/// Pair of PSD matrices witnessing the bidisc Pick criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct PickCertificate {
    pub a1: HermitianMatrix,
    pub a2: HermitianMatrix,
    /// Max entrywise violation of the Pick equations.
    pub residual: f64,
    /// Smaller of the two minimum eigenvalues.
    pub min_eig: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub stall: f64,
    pub method: Method,
}

/// Projection scheme of the feasibility solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Method {
    /// Douglas-Rachford splitting (averaged alternating reflections).
    #[default]
    DouglasRachford,
    /// Dykstra's scheme; converges to the point of the intersection nearest
    /// the zero pair.
    Dykstra,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self::from(&Tolerances::default())
    }
}

impl From<&Tolerances> for SolverSettings {
    fn from(t: &Tolerances) -> Self {
        Self { tol: t.solver_tol, max_iter: t.solver_max_iter, stall: t.solver_stall, method: Method::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible {
        certificate: PickCertificate,
        iterations: usize,
    },
    /// Iteration stalled at a positive distance between the affine set and the cone.
    Infeasible {
        gap: f64,
        iterations: usize,
    },
    /// Budget exhausted with neither criterion met.
    Inconclusive {
        gap: f64,
        residual: f64,
        iterations: usize,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn certificate(&self) -> Option<&PickCertificate> {
        match self {
            Feasibility::Feasible { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    pub residual: f64,
    pub min_eig_a1: f64,
    pub min_eig_a2: f64,
    pub pass: bool,
}

/// Max entrywise residual of the Pick equations.
pub fn pick_residual(lp: &LiftedProblem, a1: &HermitianMatrix, a2: &HermitianMatrix) -> f64 {
    let m = lp.len();
    let mut res = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let r = lp.rhs(i, j) - lp.coefficient(0, i, j) * a1.get(i, j) - lp.coefficient(1, i, j) * a2.get(i, j);
            res = res.max(r.norm());
        }
    }
    res
}

pub fn verify_certificate(lp: &LiftedProblem, c: &PickCertificate, tol: f64) -> Result<CertificateReport> {
    let m = lp.len();
    if c.a1.dim() != m || c.a2.dim() != m {
        return Err(Error::InvalidInput(format!(
            "certificate has dimensions {} and {}, problem has {m} lifted nodes",
            c.a1.dim(),
            c.a2.dim()
        )));
    }
    let residual = pick_residual(lp, &c.a1, &c.a2);
    let min_eig_a1 = herm_eig(&c.a1)?.min();
    let min_eig_a2 = herm_eig(&c.a2)?.min();
    let pass = residual <= tol && min_eig_a1 >= -tol && min_eig_a2 >= -tol;
    Ok(CertificateReport { residual, min_eig_a1, min_eig_a2, pass })
}

fn certificate_from(lp: &LiftedProblem, a1: HermitianMatrix, a2: HermitianMatrix) -> Result<PickCertificate> {
    let residual = pick_residual(lp, &a1, &a2);
    let min_eig = herm_eig(&a1)?.min().min(herm_eig(&a2)?.min());
    Ok(PickCertificate { a1, a2, residual, min_eig })
}

/// Affine set of the Pick equations, projected entry by entry.
struct AffineSet {
    m: usize,
    // per entry: (c1, c2, rhs, |c|^2)
    rows: Vec<(C64, C64, C64, f64)>,
}

impl AffineSet {
    fn new(lp: &LiftedProblem) -> Self {
        let m = lp.len();
        let mut rows = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let c1 = lp.coefficient(0, i, j);
                let c2 = lp.coefficient(1, i, j);
                rows.push((c1, c2, lp.rhs(i, j), c1.norm_sqr() + c2.norm_sqr()));
            }
        }
        Self { m, rows }
    }

    /// Orthogonal projection onto `c1 x1 + c2 x2 = r`, applied to each entry;
    /// conjugate equations sit at (i, j) and (j, i), so Hermitian pairs map to
    /// Hermitian pairs.
    fn project(&self, a1: &HermitianMatrix, a2: &HermitianMatrix) -> (HermitianMatrix, HermitianMatrix) {
        let mut b1 = HermitianMatrix::zeros(self.m);
        let mut b2 = HermitianMatrix::zeros(self.m);
        for i in 0..self.m {
            for j in i..self.m {
                let (c1, c2, r, cc) = self.rows[i * self.m + j];
                let x1 = a1.get(i, j);
                let x2 = a2.get(i, j);
                let t = (r - c1 * x1 - c2 * x2) / cc;
                b1.set(i, j, x1 + c1.conj() * t);
                b2.set(i, j, x2 + c2.conj() * t);
            }
        }
        (b1, b2)
    }

    fn residual(&self, a1: &HermitianMatrix, a2: &HermitianMatrix) -> f64 {
        let mut res = 0.0f64;
        for i in 0..self.m {
            for j in i..self.m {
                let (c1, c2, r, _) = self.rows[i * self.m + j];
                res = res.max((r - c1 * a1.get(i, j) - c2 * a2.get(i, j)).norm());
            }
        }
        res
    }
}

fn frob_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    (a.as_matrix() - b.as_matrix()).frobenius_norm()
}

fn add(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_part(&(a.as_matrix() + b.as_matrix())).expect("square")
}

fn sub(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_part(&(a.as_matrix() - b.as_matrix())).expect("square")
}

/// Consecutive settled sweeps required before reporting infeasibility.
const STALL_WINDOW: usize = 20;

/// Decides the bidisc Pick criterion for a lifted problem.
pub fn solve_feasibility(lp: &LiftedProblem, cfg: &SolverSettings) -> Result<Feasibility> {
    lp.validate()?;
    let m = lp.len();

    // Unimodular targets: a Schur function touching the circle is constant.
    if let Some(i) = lp.targets.iter().position(|w| (w.norm() - 1.0).abs() <= 1e-12) {
        let wi = lp.targets[i];
        let spread = lp.targets.iter().map(|w| (w - wi).norm()).fold(0.0, f64::max);
        if spread <= 1e-12 {
            let certificate = certificate_from(lp, HermitianMatrix::zeros(m), HermitianMatrix::zeros(m))?;
            return Ok(Feasibility::Feasible { certificate, iterations: 0 });
        }
        return Ok(Feasibility::Infeasible { gap: spread, iterations: 0 });
    }

    match cfg.method {
        Method::DouglasRachford => douglas_rachford(lp, cfg),
        Method::Dykstra => dykstra(lp, cfg),
    }
}

/// Averaged alternating reflections. The shadow `P_A(z)` satisfies the Pick
/// equations exactly and certifies itself once it is PSD. The cone is shifted
/// by `tol I` so that the shadow turns PSD before the sets are `tol` apart. On
/// disjoint sets `z` drifts and `||P_K - P_A||` settles at the gap.
fn douglas_rachford(lp: &LiftedProblem, cfg: &SolverSettings) -> Result<Feasibility> {
    let m = lp.len();
    let affine = AffineSet::new(lp);
    let margin = cfg.tol;
    let mut z1 = HermitianMatrix::zeros(m);
    let mut z2 = HermitianMatrix::zeros(m);
    let mut gap = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut settled = 0usize;

    for it in 1..=cfg.max_iter {
        let (a1, a2) = affine.project(&z1, &z2);
        let min_eig = herm_eig(&a1)?.min().min(herm_eig(&a2)?.min());
        if min_eig >= -cfg.tol {
            let residual = pick_residual(lp, &a1, &a2);
            if residual <= cfg.tol {
                let certificate = PickCertificate { a1, a2, residual, min_eig };
                return Ok(Feasibility::Feasible { certificate, iterations: it });
            }
        }
        let (b1, _) = psd_project_with_min(&sub(&add(&a1, &a1), &z1).shift(-margin))?;
        let (b2, _) = psd_project_with_min(&sub(&add(&a2, &a2), &z2).shift(-margin))?;
        let (b1, b2) = (b1.shift(margin), b2.shift(margin));
        let d = frob_diff(&b1, &a1).hypot(frob_diff(&b2, &a2));
        residual = affine.residual(&b1, &b2);
        z1 = add(&z1, &sub(&b1, &a1));
        z2 = add(&z2, &sub(&b2, &a2));
        settled = if (d - gap).abs() < cfg.stall { settled + 1 } else { 0 };
        gap = d;
        if settled >= STALL_WINDOW && gap > cfg.tol {
            return Ok(Feasibility::Infeasible { gap, iterations: it });
        }
    }
    Ok(Feasibility::Inconclusive { gap, residual, iterations: cfg.max_iter })
}

/// Dykstra's alternating projections from the zero pair.
fn dykstra(lp: &LiftedProblem, cfg: &SolverSettings) -> Result<Feasibility> {
    let m = lp.len();
    let affine = AffineSet::new(lp);
    let mut x1 = HermitianMatrix::zeros(m);
    let mut x2 = HermitianMatrix::zeros(m);
    let mut q1 = HermitianMatrix::zeros(m);
    let mut q2 = HermitianMatrix::zeros(m);
    let mut gap = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for it in 1..=cfg.max_iter {
        let (y1, y2) = affine.project(&x1, &x2);
        gap = frob_diff(&x1, &y1).hypot(frob_diff(&x2, &y2));
        let (z1, z2) = (add(&y1, &q1), add(&y2, &q2));
        let (n1, _) = psd_project_with_min(&z1)?;
        let (n2, _) = psd_project_with_min(&z2)?;
        q1 = sub(&z1, &n1);
        q2 = sub(&z2, &n2);
        let step = frob_diff(&n1, &x1).hypot(frob_diff(&n2, &x2));
        x1 = n1;
        x2 = n2;

        residual = affine.residual(&x1, &x2);
        if residual <= cfg.tol {
            let certificate = certificate_from(lp, x1, x2)?;
            if certificate.residual <= cfg.tol && certificate.min_eig >= -cfg.tol {
                return Ok(Feasibility::Feasible { certificate, iterations: it });
            }
            return Ok(Feasibility::Inconclusive { gap, residual: certificate.residual, iterations: it });
        }
        if step < cfg.stall && gap > cfg.tol {
            return Ok(Feasibility::Infeasible { gap, iterations: it });
        }
    }
    Ok(Feasibility::Inconclusive { gap, residual, iterations: cfg.max_iter })
}

/// Explicit certificate for a problem with a single source node.
///
/// Uses the split `a^k_ij = (1 - |w|^2) / (2 (1 - conj(l^k_i) l^k_j))`, i.e.
/// half of the Szego kernel of each coordinate, which is PSD and satisfies
/// every equation exactly.
pub fn solve_n1_closed_form(lp: &LiftedProblem) -> Result<PickCertificate> {
    lp.validate()?;
    if lp.origin.iter().any(|&j| j != lp.origin[0]) {
        return Err(Error::InvalidInput("closed form needs a single source node".into()));
    }
    let m = lp.len();
    let w = lp.targets[0];
    let scale = (1.0 - w.norm_sqr()).max(0.0) * 0.5;
    let mut a = [HermitianMatrix::zeros(m), HermitianMatrix::zeros(m)];
    for (k, ak) in a.iter_mut().enumerate() {
        for i in 0..m {
            for j in i..m {
                ak.set(i, j, C64::new(scale, 0.0) / lp.coefficient(k, i, j));
            }
        }
    }
    let [a1, a2] = a;
    certificate_from(lp, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, CMatrix};

    fn lifted(nodes: &[GPoint], targets: &[C64]) -> LiftedProblem {
        lift_problem(&PickProblem { nodes: nodes.to_vec(), targets: targets.to_vec() }).unwrap()
    }

    #[test]
    fn lift_examples() {
        let lp = lifted(&[GPoint::real(0.0, 0.0)], &[c64(0.5, 0.0)]);
        assert_eq!(lp.len(), 1);
        assert_eq!(lp.nodes[0], BidiscPoint::new(c64(0.0, 0.0), c64(0.0, 0.0)));

        let lp = lifted(&[GPoint::real(0.9, 0.2)], &[c64(0.1, 0.2)]);
        assert_eq!(lp.len(), 2);
        assert!((lp.nodes[0].l1 - c64(0.4, 0.0)).norm() < 1e-15);
        assert!((lp.nodes[1].l1 - c64(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(lp.targets[0], lp.targets[1]);
        assert_eq!(lp.sigma_index().unwrap(), vec![1, 0]);

        let lp = lifted(&[GPoint::real(0.0, 0.0), GPoint::real(1.0, 0.25)], &[c64(0.0, 0.0), c64(0.1, 0.0)]);
        assert_eq!(lp.len(), 2);
        assert_eq!(lp.origin, vec![0, 1]);
    }

    #[test]
    fn lift_rejects_bad_nodes() {
        let p = PickProblem { nodes: vec![GPoint::real(2.0, 1.0)], targets: vec![c64(0.0, 0.0)] };
        assert!(matches!(lift_problem(&p), Err(Error::OutOfDomain(_))));
        let p = PickProblem {
            nodes: vec![GPoint::real(0.1, 0.0), GPoint::real(0.1 + 1e-9, 0.0)],
            targets: vec![c64(0.0, 0.0), c64(0.0, 0.0)],
        };
        assert!(matches!(lift_problem(&p), Err(Error::DuplicateNodes { i: 0, j: 1, .. })));
        let p = PickProblem { nodes: vec![GPoint::real(0.1, 0.0)], targets: vec![c64(1.5, 0.0)] };
        assert!(matches!(lift_problem(&p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn single_node_at_origin_is_feasible() {
        let lp = lifted(&[GPoint::real(0.0, 0.0)], &[c64(0.5, 0.0)]);
        let out = solve_feasibility(&lp, &SolverSettings::default()).unwrap();
        let cert = out.certificate().expect("feasible");
        let sum = cert.a1.get(0, 0) + cert.a2.get(0, 0);
        assert!((sum - c64(0.75, 0.0)).norm() < 1e-9);
        assert!(verify_certificate(&lp, cert, 1e-9).unwrap().pass);

        let manual = PickCertificate {
            a1: HermitianMatrix::from_real_diag(&[0.375]),
            a2: HermitianMatrix::from_real_diag(&[0.375]),
            residual: 0.0,
            min_eig: 0.375,
        };
        let rep = verify_certificate(&lp, &manual, 1e-12).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn schwarz_pick_violation_is_infeasible() {
        let lp = lifted(&[GPoint::real(0.0, 0.0), GPoint::real(0.2, 0.01)], &[c64(0.0, 0.0), c64(0.9, 0.0)]);
        match solve_feasibility(&lp, &SolverSettings::default()).unwrap() {
            Feasibility::Infeasible { gap, .. } => assert!(gap > 0.01, "gap {gap}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn both_methods_agree_on_feasibility() {
        let nodes = [GPoint::real(0.1, 0.0), GPoint::new(c64(0.3, 0.2), c64(-0.1, 0.05)), GPoint::real(-0.5, 0.2)];
        let targets = [c64(0.1, 0.0), c64(0.2, -0.1), c64(-0.1, 0.1)];
        let lp = lifted(&nodes, &targets);
        for method in [Method::DouglasRachford, Method::Dykstra] {
            let cfg = SolverSettings { method, ..Default::default() };
            let out = solve_feasibility(&lp, &cfg).unwrap();
            let cert = out.certificate().unwrap_or_else(|| panic!("{method:?}: {out:?}"));
            assert!(verify_certificate(&lp, cert, 1e-9).unwrap().pass);
        }
        let bad = lifted(&[GPoint::real(0.0, 0.0), GPoint::real(0.2, 0.01)], &[c64(0.0, 0.0), c64(0.9, 0.0)]);
        let cfg = SolverSettings { method: Method::Dykstra, ..Default::default() };
        assert!(matches!(solve_feasibility(&bad, &cfg).unwrap(), Feasibility::Infeasible { .. }));
    }

    #[test]
    fn unimodular_targets() {
        let w = C64::from_polar(1.0, 0.7);
        let lp = lifted(&[GPoint::real(0.1, 0.0), GPoint::real(0.9, 0.2)], &[w, w]);
        let out = solve_feasibility(&lp, &SolverSettings::default()).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.a1, HermitianMatrix::zeros(lp.len()));
        assert!(cert.residual < 1e-15);

        let lp = lifted(&[GPoint::real(0.1, 0.0), GPoint::real(0.9, 0.2)], &[w, c64(0.0, 0.0)]);
        assert!(matches!(solve_feasibility(&lp, &SolverSettings::default()).unwrap(), Feasibility::Infeasible { .. }));
    }

    #[test]
    fn perturbed_certificate_fails() {
        let lp = lifted(&[GPoint::real(0.9, 0.2)], &[c64(0.5, 0.0)]);
        let mut cert = solve_n1_closed_form(&lp).unwrap();
        assert!(verify_certificate(&lp, &cert, 1e-12).unwrap().pass);
        let z = cert.a1.get(0, 1);
        cert.a1.set(0, 1, z + c64(0.1, 0.0));
        let rep = verify_certificate(&lp, &cert, 1e-9).unwrap();
        assert!(!rep.pass);
        let expect = 0.1 * lp.coefficient(0, 0, 1).norm();
        assert!((rep.residual - expect).abs() < 1e-14, "{} vs {expect}", rep.residual);
    }

    #[test]
    fn zero_certificate_fails() {
        let lp = lifted(&[GPoint::real(0.3, 0.02), GPoint::real(-0.4, 0.0)], &[c64(0.2, 0.0), c64(0.0, 0.5)]);
        let zero = PickCertificate {
            a1: HermitianMatrix::zeros(lp.len()),
            a2: HermitianMatrix::zeros(lp.len()),
            residual: 0.0,
            min_eig: 0.0,
        };
        let rep = verify_certificate(&lp, &zero, 1e-9).unwrap();
        assert!(!rep.pass);
        let expect = (0..lp.len())
            .flat_map(|i| (0..lp.len()).map(move |j| (i, j)))
            .map(|(i, j)| lp.rhs(i, j).norm())
            .fold(0.0, f64::max);
        assert!((rep.residual - expect).abs() < 1e-15);
        let bad = PickCertificate { a1: HermitianMatrix::zeros(1), ..zero };
        assert!(verify_certificate(&lp, &bad, 1e-9).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let lp = lifted(&[GPoint::real(0.0, 0.0)], &[c64(0.0, 0.0)]);
        let c = solve_n1_closed_form(&lp).unwrap();
        assert_eq!(c.a1.get(0, 0), c64(0.5, 0.0));
        assert_eq!(c.a2.get(0, 0), c64(0.5, 0.0));

        let lp = lifted(&[GPoint::real(0.0, 0.0)], &[c64(1.0, 0.0)]);
        let c = solve_n1_closed_form(&lp).unwrap();
        assert_eq!(c.a1, HermitianMatrix::zeros(1));

        let lp = lifted(&[GPoint::real(0.9, 0.2)], &[c64(0.5, 0.0)]);
        let c = solve_n1_closed_form(&lp).unwrap();
        assert!(verify_certificate(&lp, &c, 1e-12).unwrap().pass);

        let two = lifted(&[GPoint::real(0.0, 0.0), GPoint::real(0.5, 0.0)], &[c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert!(solve_n1_closed_form(&two).is_err());
    }

    #[test]
    fn affine_projection_is_idempotent_and_hermitian() {
        let lp = lifted(
            &[GPoint::real(0.9, 0.2), GPoint::new(c64(0.1, 0.3), c64(-0.2, 0.1))],
            &[c64(0.3, 0.1), c64(-0.2, 0.4)],
        );
        let aff = AffineSet::new(&lp);
        let m = lp.len();
        let a = HermitianMatrix::from_hermitian_part(&CMatrix::from_fn(m, m, |i, j| {
            c64((i + j) as f64, i as f64 - j as f64)
        }))
        .unwrap();
        let (p1, p2) = aff.project(&a, &HermitianMatrix::identity(m));
        assert!(aff.residual(&p1, &p2) < 1e-14);
        let (q1, q2) = aff.project(&p1, &p2);
        assert!(frob_diff(&p1, &q1) < 1e-14 && frob_diff(&p2, &q2) < 1e-14);
    }
}
