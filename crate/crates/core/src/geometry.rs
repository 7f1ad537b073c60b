//! Function theory of the symmetrized bidisc: the symmetrization map and
//! its fibers, membership, the linear fractional family `f_s` and the
//! operator substitution `s_T`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{operator_norm, solve_linear, CMatrix, C64};

/// A point `(s1, s2)` of C^2; in G when `s1 = z + w`, `s2 = z w` with `z, w` in the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPoint {
    pub s1: C64,
    pub s2: C64,
}

impl GPoint {
    pub fn new(s1: C64, s2: C64) -> Self {
        Self { s1, s2 }
    }

    pub fn real(s1: f64, s2: f64) -> Self {
        Self::new(C64::new(s1, 0.0), C64::new(s2, 0.0))
    }

    /// Max-norm distance on (s1, s2).
    pub fn distance(&self, other: &GPoint) -> f64 {
        (self.s1 - other.s1).norm().max((self.s2 - other.s2).norm())
    }

    pub fn is_finite(&self) -> bool {
        [self.s1, self.s2].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// A point of C^2 viewed as a candidate point of the bidisc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidiscPoint {
    pub l1: C64,
    pub l2: C64,
}

impl BidiscPoint {
    pub fn new(l1: C64, l2: C64) -> Self {
        Self { l1, l2 }
    }

    /// Coordinate transposition.
    pub fn sigma(&self) -> Self {
        Self { l1: self.l2, l2: self.l1 }
    }

    pub fn is_interior(&self) -> bool {
        self.l1.norm() < 1.0 && self.l2.norm() < 1.0
    }

    pub fn coord(&self, k: usize) -> C64 {
        match k {
            0 => self.l1,
            1 => self.l2,
            _ => panic!("bidisc coordinate index {k} out of range"),
        }
    }
}

/// Preimage of a point under the symmetrization map.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    /// One point for a double root, otherwise the pair `(z_a, z_b), (z_b, z_a)`
    /// with `z_a < z_b` in (re, im) lexicographic order.
    pub points: Vec<BidiscPoint>,
    pub double_root: bool,
}

impl Fiber {
    /// Largest modulus of a fiber coordinate.
    pub fn radius(&self) -> f64 {
        self.points.iter().map(|p| p.l1.norm().max(p.l2.norm())).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// Classification of a point together with the margin `sup_D |f_s|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub region: Region,
    /// `sup` of `|f_s|` over the disc; `None` when `|s1| >= 2` (pole in the closed disc).
    pub rho: Option<f64>,
    /// Largest modulus among the fiber coordinates.
    pub fiber_radius: f64,
}

/// `pi(mu) = (mu1 + mu2, mu1 mu2)`
pub fn pi_map(mu: &BidiscPoint) -> GPoint {
    GPoint::new(mu.l1 + mu.l2, mu.l1 * mu.l2)
}

/// Roots of `z^2 - s1 z + s2 = 0`, arranged as bidisc points.
pub fn fiber(s: &GPoint) -> Fiber {
    let d = s.s1 * s.s1 - s.s2 * 4.0;
    let disc = d.sqrt();
    // larger-magnitude root first, the other from the product
    let big = if (s.s1.conj() * disc).re >= 0.0 { (s.s1 + disc) * 0.5 } else { (s.s1 - disc) * 0.5 };
    let small = if big.norm() > 0.0 { s.s2 / big } else { C64::new(0.0, 0.0) };
    let scale = 1.0f64.max(s.s1.norm_sqr()).max(s.s2.norm());
    // a discriminant at rounding level would split a double root by ~1e-8
    if d.norm() <= 16.0 * f64::EPSILON * scale || (big - small).norm() <= 1e-12 * scale.sqrt() {
        let z = s.s1 * 0.5;
        return Fiber { points: vec![BidiscPoint::new(z, z)], double_root: true };
    }
    let (za, zb) = if (big.re, big.im) <= (small.re, small.im) { (big, small) } else { (small, big) };
    Fiber { points: vec![BidiscPoint::new(za, zb), BidiscPoint::new(zb, za)], double_root: false }
}

/// `(2 |s1 - conj(s1) s2| + |s1^2 - 4 s2|) / (4 - |s1|^2)`, the supremum of
/// `|f_s|` over the disc, defined for `|s1| < 2`.
pub fn rho(s: &GPoint) -> Option<f64> {
    let a = s.s1.norm_sqr();
    if a >= 4.0 {
        return None;
    }
    let num = 2.0 * (s.s1 - s.s1.conj() * s.s2).norm() + (s.s1 * s.s1 - s.s2 * 4.0).norm();
    Some(num / (4.0 - a))
}

pub fn membership(s: &GPoint) -> Membership {
    membership_with(s, Tolerances::default().boundary)
}

pub fn membership_with(s: &GPoint, tol: f64) -> Membership {
    let fiber_radius = fiber(s).radius();
    let classify = |x: f64| {
        if (x - 1.0).abs() <= tol {
            Region::Boundary
        } else if x < 1.0 {
            Region::Interior
        } else {
            Region::Exterior
        }
    };
    match rho(s) {
        Some(r) if s.s1.norm() < 2.0 => Membership { region: classify(r), rho: Some(r), fiber_radius },
        _ => Membership { region: classify(fiber_radius), rho: None, fiber_radius },
    }
}

pub fn is_interior(s: &GPoint) -> bool {
    membership(s).region == Region::Interior
}

/// `f_s(lambda) = (2 lambda s2 - s1) / (2 - lambda s1)`
pub fn f_s_eval(s: &GPoint, lambda: C64) -> Result<C64> {
    let den = C64::new(2.0, 0.0) - lambda * s.s1;
    if den.norm() <= 1e-14 {
        return Err(Error::PoleAtBoundary(format!("2 - lambda s1 vanishes at lambda = {lambda}")));
    }
    Ok((lambda * s.s2 * 2.0 - s.s1) / den)
}

/// Test function `Phi_omega(s) = f_s(omega)` for unimodular `omega`.
pub fn phi_omega(omega: C64, s: &GPoint) -> Result<C64> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("omega = {omega} is not unimodular")));
    }
    f_s_eval(s, omega)
}

/// `s_T = (2 s2 T - s1)(2 - s1 T)^{-1}` for a contraction `T`.
pub fn s_operator(s: &GPoint, t: &CMatrix) -> Result<CMatrix> {
    if !t.is_square() {
        return Err(Error::InvalidInput("operator must be square".into()));
    }
    let norm = operator_norm(t);
    if norm > 1.0 + Tolerances::default().contraction_slack {
        return Err(Error::NotAContraction { norm });
    }
    if s.s1.norm() >= 2.0 {
        return Err(Error::OutOfDomain(format!("|s1| = {} >= 2", s.s1.norm())));
    }
    s_operator_unchecked(s, t)
}

/// `s_T` without the contraction and domain checks.
pub(crate) fn s_operator_unchecked(s: &GPoint, t: &CMatrix) -> Result<CMatrix> {
    let num = t.scale(s.s2 * 2.0).shift(-s.s1);
    let den = t.scale(-s.s1).shift(C64::new(2.0, 0.0));
    // num and den are functions of T and commute, so den^{-1} num = num den^{-1}.
    solve_linear(&den, &num)
}
