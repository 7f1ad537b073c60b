//! Transfer-function realizations
//!
//! ```text
//! phi(s) = A + <s_T (1 - D s_T)^{-1} gamma, beta>
//! ```
//!
//! of Schur-class functions on G, built from a G-model or drawn at random.

use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{f_s_eval, membership_with, s_operator_unchecked, GPoint, Region};
use crate::lurking;
use crate::modelbuild::{bidisc_model_with, symmetrize_with_report, verify_gmodel, GModel, SymmetrizeReport};
use crate::numerics::{inner, isometry_defect, normal_eig, operator_norm, vec_norm, CMatrix, Lu, C64};
use crate::pick::{lift_problem_with, solve_feasibility, Feasibility, LiftedProblem, PickCertificate, PickProblem};
use crate::sampling::{random_contraction, random_unitary, rng};

/// Colligation `([[A, beta*], [gamma, D]], T)` on `C + M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    pub a: C64,
    pub beta: Vec<C64>,
    pub gamma: Vec<C64>,
    pub d: CMatrix,
    pub t: CMatrix,
}

impl Colligation {
    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    /// `[[A, conj(beta)^T], [gamma, D]]`
    pub fn block(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => self.a,
            (0, j) => self.beta[j - 1].conj(),
            (i, 0) => self.gamma[i - 1],
            (i, j) => self.d[(i - 1, j - 1)],
        })
    }

    pub fn from_block(block: &CMatrix, t: CMatrix) -> Self {
        let n = block.rows() - 1;
        Self {
            a: block[(0, 0)],
            beta: (1..=n).map(|j| block[(0, j)].conj()).collect(),
            gamma: (1..=n).map(|i| block[(i, 0)]).collect(),
            d: block.submatrix(1..n + 1, 1..n + 1),
            t,
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = self.dim();
        if !self.t.is_square()
            || self.beta.len() != n
            || self.gamma.len() != n
            || self.d.rows() != n
            || self.d.cols() != n
        {
            return Err(Error::InvalidInput("colligation blocks have inconsistent sizes".into()));
        }
        let norm = operator_norm(&self.block());
        if !(norm <= 1.0 + 1e-9) {
            return Err(Error::NotAContraction { norm });
        }
        let tn = operator_norm(&self.t);
        if !(tn <= 1.0 + tol.contraction_slack) {
            return Err(Error::NotAContraction { norm: tn });
        }
        Ok(())
    }
}

/// Colligation with `T` diagonalized once, when `T` is unitary.
#[derive(Debug, Clone)]
struct Diagonal {
    omega: Vec<C64>,
    d: CMatrix,
    beta: Vec<C64>,
    gamma: Vec<C64>,
}

/// Function on G defined by a contractive colligation. Immutable; evaluation
/// is safe from many threads.
#[derive(Debug, Clone)]
pub struct RealizedFunction {
    colligation: Colligation,
    diag: Option<Diagonal>,
    tol: Tolerances,
}

impl RealizedFunction {
    pub fn new(c: Colligation) -> Result<Self> {
        Self::with_tolerances(c, Tolerances::default())
    }

    pub fn with_tolerances(c: Colligation, tol: Tolerances) -> Result<Self> {
        c.validate(&tol)?;
        let diag = if c.dim() > 0 && isometry_defect(&c.t) <= tol.unitary_tol {
            let (omega, v) = normal_eig(&c.t, 1e-8)?;
            let vh = v.adjoint();
            Some(Diagonal {
                omega,
                d: vh.matmul(&c.d).matmul(&v),
                beta: vh.mul_vec(&c.beta),
                gamma: vh.mul_vec(&c.gamma),
            })
        } else {
            None
        };
        Ok(Self { colligation: c, diag, tol })
    }

    pub fn colligation(&self) -> &Colligation {
        &self.colligation
    }

    /// Constant function `w` on a one-dimensional state space with `T = 1`.
    pub fn constant(w: C64) -> Result<Self> {
        Self::new(Colligation {
            a: w,
            beta: vec![C64::new(0.0, 0.0)],
            gamma: vec![C64::new(0.0, 0.0)],
            d: CMatrix::zeros(1, 1),
            t: CMatrix::identity(1),
        })
    }

    pub fn evaluate(&self, s: &GPoint) -> Result<C64> {
        let m = membership_with(s, self.tol.boundary);
        if m.region == Region::Exterior || s.s1.norm() >= 2.0 {
            return Err(Error::OutOfDomain(format!("({}, {}) is {:?}", s.s1, s.s2, m.region)));
        }
        self.evaluate_unchecked(s)
    }

    fn evaluate_unchecked(&self, s: &GPoint) -> Result<C64> {
        let c = &self.colligation;
        let n = c.dim();
        if n == 0 {
            return Ok(c.a);
        }
        let (sys, rhs, weights) = match &self.diag {
            Some(dg) => {
                let lam: Vec<C64> = dg.omega.iter().map(|&w| f_s_eval(s, w)).collect::<Result<_>>()?;
                let sys = CMatrix::from_fn(n, n, |i, j| {
                    let id = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                    id - dg.d[(i, j)] * lam[j]
                });
                // <Lambda y, beta'> = <y, conj(Lambda) beta'>
                let weights: Vec<C64> = dg.beta.iter().zip(&lam).map(|(b, l)| l.conj() * b).collect();
                (sys, dg.gamma.clone(), weights)
            }
            None => {
                let st = s_operator_unchecked(s, &c.t)?;
                let sys = &CMatrix::identity(n) - &c.d.matmul(&st);
                let weights = st.adjoint().mul_vec(&c.beta);
                (sys, c.gamma.clone(), weights)
            }
        };
        let lu = Lu::new(&sys)?;
        let cond = lu.condition_estimate();
        if !(cond <= self.tol.max_condition) {
            return Err(Error::IllConditioned { cond });
        }
        let x = lu.solve_vec(&rhs);
        Ok(c.a + inner(&x, &weights))
    }

    /// `max |phi|` over the given points, evaluated in parallel.
    pub fn max_modulus(&self, points: &[GPoint]) -> Result<f64> {
        points.par_iter().map(|s| self.evaluate(s).map(|z| z.norm())).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }

    /// `(1 - D s_T)^{-1} gamma`, the model vector the colligation assigns to `s`.
    pub fn state(&self, s: &GPoint) -> Result<Vec<C64>> {
        let c = &self.colligation;
        let st = s_operator_unchecked(s, &c.t)?;
        let sys = &CMatrix::identity(c.dim()) - &c.d.matmul(&st);
        Ok(Lu::new(&sys)?.solve_vec(&c.gamma))
    }
}

pub fn evaluate(f: &RealizedFunction, s: &GPoint) -> Result<C64> {
    f.evaluate(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationReport {
    /// `max_j |phi(s_j) - w_j|`
    pub node_residual: f64,
    /// Operator norm of the block matrix.
    pub lsharp_norm: f64,
    pub gram_mismatch: f64,
    /// `max_j |v_j - (1 - D (s_j)_T)^{-1} gamma|`
    pub state_residual: f64,
}

pub fn build_colligation(gm: &GModel, targets: &[C64]) -> Result<Colligation> {
    build_colligation_with(gm, targets, &Tolerances::default()).map(|(c, _)| c)
}

/// Matches `(1, (s_j)_T v_j) -> (w_j, v_j)` by an isometry on the span of the
/// left-hand family, extended by zero to a contraction on `C + M`, and reads
/// the colligation off its blocks.
pub fn build_colligation_with(
    gm: &GModel,
    targets: &[C64],
    tol: &Tolerances,
) -> Result<(Colligation, RealizationReport)> {
    let rep = verify_gmodel(gm, targets, tol.gram_tol)?;
    if !rep.pass {
        return Err(Error::ModelInconsistent { mismatch: rep.residual });
    }
    let n = gm.dim;
    let k = gm.nodes.len();
    let mut x = CMatrix::zeros(n + 1, k);
    let mut y = CMatrix::zeros(n + 1, k);
    for j in 0..k {
        let sv = s_operator_unchecked(&gm.nodes[j], &gm.t)?.mul_vec(&gm.v[j]);
        x[(0, j)] = C64::new(1.0, 0.0);
        y[(0, j)] = targets[j];
        for i in 0..n {
            x[(i + 1, j)] = sv[i];
            y[(i + 1, j)] = gm.v[j][i];
        }
    }
    let fit = lurking::fit(&x, &y, tol.rank_rel, tol.gram_tol)?;
    let c = Colligation::from_block(&fit.l, gm.t.clone());
    let lsharp_norm = operator_norm(&fit.l);
    let f = RealizedFunction::with_tolerances(c.clone(), *tol)?;
    let mut node_residual = 0.0f64;
    let mut state_residual = 0.0f64;
    for ((s, w), v) in gm.nodes.iter().zip(targets).zip(&gm.v).take(k) {
        node_residual = node_residual.max((f.evaluate(s)? - w).norm());
        let st = f.state(s)?;
        let diff: Vec<C64> = st.iter().zip(v).map(|(a, b)| a - b).collect();
        state_residual = state_residual.max(vec_norm(&diff));
    }
    Ok((c, RealizationReport { node_residual, lsharp_norm, gram_mismatch: fit.gram_mismatch, state_residual }))
}

/// Random Schur-class function: Haar unitary `T` of size `dim` and a Haar
/// unitary block on `C + M` scaled by a uniform factor in `[0.3, 1]`.
pub fn random_schur(dim: usize, seed: u64) -> Result<RealizedFunction> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let mut r = rng(seed);
    let t = random_unitary(&mut r, dim);
    let block = random_contraction(&mut r, dim + 1, 0.3, 1.0);
    RealizedFunction::new(Colligation::from_block(&block, t))
}

/// Largest disagreement between real and imaginary central differences
/// `(f(s + h e) - f(s - h e)) / 2h` and `(f(s + i h e) - f(s - i h e)) / 2ih`
/// over four directions `e` in C^2. Vanishes to O(h^2) for holomorphic `f`.
pub fn directional_derivative_check(f: &RealizedFunction, s: &GPoint) -> Result<f64> {
    directional_derivative_check_with(f, s, 1e-5)
}

pub fn directional_derivative_check_with(f: &RealizedFunction, s: &GPoint, h: f64) -> Result<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(r, 0.0), C64::new(r, 0.0)),
        (C64::new(r, 0.0), C64::new(0.0, r)),
    ];
    let shifted = |e: (C64, C64), t: C64| GPoint::new(s.s1 + e.0 * t, s.s2 + e.1 * t);
    let mut worst = 0.0f64;
    for e in dirs {
        let hr = C64::new(h, 0.0);
        let hi = C64::new(0.0, h);
        let dr = (f.evaluate(&shifted(e, hr))? - f.evaluate(&shifted(e, -hr))?) / (hr * 2.0);
        let di = (f.evaluate(&shifted(e, hi))? - f.evaluate(&shifted(e, -hi))?) / (hi * 2.0);
        worst = worst.max((dr - di).norm());
    }
    Ok(worst)
}

/// Everything produced by a successful interpolation run.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub lifted: LiftedProblem,
    pub certificate: PickCertificate,
    pub gmodel: GModel,
    pub symmetrize: SymmetrizeReport,
    pub colligation: Colligation,
    pub realization: RealizationReport,
    pub function: RealizedFunction,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Feasible(Box<Interpolant>),
    Infeasible { gap: f64, iterations: usize },
    Inconclusive { gap: f64, residual: f64, iterations: usize },
}

/// Decides solvability and, when solvable, builds an interpolant.
pub fn interpolate(p: &PickProblem, tol: &Tolerances) -> Result<Outcome> {
    let lifted = lift_problem_with(p, tol)?;
    let (certificate, iterations) = match solve_feasibility(&lifted, &tol.into())? {
        Feasibility::Feasible { certificate, iterations } => (certificate, iterations),
        Feasibility::Infeasible { gap, iterations } => return Ok(Outcome::Infeasible { gap, iterations }),
        Feasibility::Inconclusive { gap, residual, iterations } => {
            return Ok(Outcome::Inconclusive { gap, residual, iterations })
        }
    };
    let bm = bidisc_model_with(&lifted, &certificate, tol)?;
    let (mut gmodel, symmetrize) = symmetrize_with_report(&bm, tol)?;
    // keep the caller's nodes rather than their images through the fiber
    gmodel.nodes = p.nodes.clone();
    gmodel.residual = verify_gmodel(&gmodel, &p.targets, tol.gram_tol)?.residual;
    let (colligation, realization) = build_colligation_with(&gmodel, &p.targets, tol)?;
    let function = RealizedFunction::with_tolerances(colligation.clone(), *tol)?;
    Ok(Outcome::Feasible(Box::new(Interpolant {
        lifted,
        certificate,
        gmodel,
        symmetrize,
        colligation,
        realization,
        function,
        iterations,
    })))
}
