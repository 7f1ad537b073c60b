//! Property tests across modules.

use proptest::prelude::*;

use symbidisc::cli::generate_problem;
use symbidisc::geometry::{fiber, membership, phi_omega, pi_map, rho, s_operator};
use symbidisc::modelbuild::spectral_decompose;
use symbidisc::numerics::{c64, herm_eig, operator_norm, psd_factor, psd_project};
use symbidisc::pick::{
    lift_problem, solve_feasibility, verify_certificate, Feasibility, LiftedProblem, PickProblem, SolverSettings,
};
use symbidisc::realize::{interpolate, Outcome};
use symbidisc::sampling::{bidisc_point, gaussian_matrix, interior_point, random_contraction, random_unitary, rng};
use symbidisc::spectral::{discontinuity_demo, spectral_domain_check, CommutingPair, DiagonalDefiningFunction};
use symbidisc::{CMatrix, HermitianMatrix, Region, Tolerances, C64};

fn random_hermitian(seed: u64, n: usize) -> HermitianMatrix {
    let g = gaussian_matrix(&mut rng(seed), n, n);
    HermitianMatrix::from_hermitian_part(&(&g + &g.adjoint())).unwrap()
}

fn circle_max(s: &symbidisc::GPoint, grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let l = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
            ((l * s.s2 * 2.0 - s.s1) / (C64::new(2.0, 0.0) - l * s.s1)).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), n in 1usize..=32) {
        let h = random_hermitian(seed, n);
        let e = herm_eig(&h).unwrap();
        let err = (&e.reconstruct_with(|l| l) - h.as_matrix()).frobenius_norm();
        prop_assert!(err <= 1e-11 * n as f64 * h.as_matrix().frobenius_norm());
    }

    #[test]
    fn psd_projection_is_idempotent(seed in any::<u64>(), n in 1usize..=12) {
        let p = psd_project(&random_hermitian(seed, n)).unwrap();
        let pp = psd_project(&p).unwrap();
        prop_assert!((pp.as_matrix() - p.as_matrix()).max_abs() <= 1e-12 * p.as_matrix().max_abs().max(1.0));
    }

    #[test]
    fn operator_norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let a = gaussian_matrix(&mut r, n, n);
        let b = gaussian_matrix(&mut r, n, n);
        prop_assert!(operator_norm(&a.matmul(&b)) <= operator_norm(&a) * operator_norm(&b) + 1e-12);
    }

    #[test]
    fn psd_factor_round_trip(seed in any::<u64>(), n in 1usize..=10, rank in 1usize..=10) {
        let g = gaussian_matrix(&mut rng(seed), n, rank.min(n));
        let h = HermitianMatrix::from_hermitian_part(&g.matmul(&g.adjoint())).unwrap();
        let f = psd_factor(&h, 1e-12).unwrap();
        let err = (&f.matmul(&f.adjoint()) - h.as_matrix()).max_abs();
        prop_assert!(err <= 1e-10 * h.as_matrix().max_abs().max(1.0));
    }

    #[test]
    fn symmetrized_points_are_interior(seed in any::<u64>()) {
        let mu = bidisc_point(&mut rng(seed), 0.99);
        let s = pi_map(&mu);
        let m = membership(&s);
        prop_assert_eq!(m.region, Region::Interior);
        let r = rho(&s).unwrap();
        prop_assert!(r < 1.0);
        prop_assert!((circle_max(&s, 4096) - r).abs() <= 1e-3);
        let f = fiber(&s);
        prop_assert!(f.points.iter().any(|p| (p.l1 - mu.l1).norm() < 1e-10 && (p.l2 - mu.l2).norm() < 1e-10));
        prop_assert!(f.points.iter().any(|p| (p.l1 - mu.l2).norm() < 1e-10 && (p.l2 - mu.l1).norm() < 1e-10));
        for p in &f.points {
            let back = pi_map(p);
            prop_assert!((back.s1 - s.s1).norm() <= 1e-12 && (back.s2 - s.s2).norm() <= 1e-12);
        }
    }

    #[test]
    fn phi_omega_maps_into_the_disc(seed in any::<u64>(), theta in 0.0f64..std::f64::consts::TAU) {
        let s = interior_point(&mut rng(seed), 0.999);
        prop_assert!(phi_omega(C64::from_polar(1.0, theta), &s).unwrap().norm() < 1.0);
    }

    #[test]
    fn von_neumann_bound(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let s = interior_point(&mut r, 0.99);
        let t = random_contraction(&mut r, n, 0.0, 1.0);
        prop_assert!(operator_norm(&s_operator(&s, &t).unwrap()) <= rho(&s).unwrap() + 1e-10);
    }

    #[test]
    fn diagonal_unitary_gives_diagonal_phi(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let s = interior_point(&mut r, 0.95);
        let w: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 0.37 + 1.1 * k as f64 + seed as f64 * 1e-3)).collect();
        let st = s_operator(&s, &CMatrix::from_diag(&w)).unwrap();
        let want = CMatrix::from_diag(&w.iter().map(|&x| phi_omega(x, &s).unwrap()).collect::<Vec<_>>());
        prop_assert!((&st - &want).max_abs() <= 1e-14);
    }

    #[test]
    fn spectral_mapping(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let u = random_unitary(&mut r, n);
        let sd = spectral_decompose(&u).unwrap();
        let s = interior_point(&mut r, 0.95);
        prop_assert!(sd.mapping_defect(&s).unwrap() <= 1e-10);
        let mut sum = CMatrix::zeros(n, n);
        for e in &sd.projections {
            prop_assert!((&e.matmul(e) - e).max_abs() <= 1e-10);
            prop_assert!((&e.adjoint() - e).max_abs() <= 1e-12);
            sum = &sum + e;
        }
        prop_assert!((&sum - &CMatrix::identity(n)).max_abs() <= 1e-10);
    }

    #[test]
    fn scalar_pair_matches_rho(seed in any::<u64>()) {
        let s = interior_point(&mut rng(seed), 0.95);
        let p = CommutingPair::new(CMatrix::from_diag(&[s.s1]), CMatrix::from_diag(&[s.s2])).unwrap();
        let grid = spectral_domain_check(&p, 1024).unwrap().max_norm;
        prop_assert!(grid <= rho(&s).unwrap() + 1e-12);
        prop_assert!((grid - rho(&s).unwrap()).abs() <= 1e-2);
    }

    #[test]
    fn refining_the_truncation_never_decreases(seed in any::<u64>(), r in 0.05f64..0.999) {
        let mut g = rng(seed);
        let omega = C64::from_polar(1.0, 0.3);
        let base: Vec<C64> = (0..8).map(|_| symbidisc::sampling::disc_point(&mut g, 0.99)).collect();
        let mut more = base.clone();
        more.extend((0..8).map(|_| symbidisc::sampling::disc_point(&mut g, 0.99)));
        let a = discontinuity_demo(&DiagonalDefiningFunction::new(base, omega).unwrap(), r).unwrap();
        let b = discontinuity_demo(&DiagonalDefiningFunction::new(more, omega).unwrap(), r).unwrap();
        prop_assert!(b.value() >= a.value());
        prop_assert!(a.agreement() <= 1e-10 && b.agreement() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feasible_certificates_meet_both_bounds(seed in any::<u64>(), n in 1usize..=4, dim in 1usize..=4) {
        let (p, _) = generate_problem(dim, n, seed).unwrap();
        let lp = lift_problem(&p).unwrap();
        prop_assert!(lp.len() >= n && lp.len() <= 2 * n);
        let cfg = SolverSettings::default();
        let out = solve_feasibility(&lp, &cfg).unwrap();
        let c = out.certificate().expect("generated problems are solvable");
        prop_assert!(c.residual <= cfg.tol && c.min_eig >= -cfg.tol);
    }

    #[test]
    fn shrinking_targets_keeps_feasibility(seed in any::<u64>(), n in 1usize..=4, dim in 1usize..=4) {
        let (p, _) = generate_problem(dim, n, seed).unwrap();
        let cfg = SolverSettings::default();
        prop_assume!(solve_feasibility(&lift_problem(&p).unwrap(), &cfg).unwrap().is_feasible());
        let half = PickProblem::new(p.nodes.clone(), p.targets.iter().map(|w| w * 0.5).collect()).unwrap();
        let out = solve_feasibility(&lift_problem(&half).unwrap(), &cfg).unwrap();
        prop_assert!(!matches!(out, Feasibility::Infeasible { .. }), "{:?}", out);
    }

    #[test]
    fn reversed_fibers_also_verify(seed in any::<u64>(), n in 1usize..=4, dim in 1usize..=4) {
        let (p, _) = generate_problem(dim, n, seed).unwrap();
        let lp = lift_problem(&p).unwrap();
        let mut rev = LiftedProblem { nodes: vec![], targets: vec![], origin: vec![] };
        for j in 0..p.len() {
            for k in (0..lp.len()).rev().filter(|&k| lp.origin[k] == j) {
                rev.nodes.push(lp.nodes[k]);
                rev.targets.push(lp.targets[k]);
                rev.origin.push(j);
            }
        }
        let cfg = SolverSettings::default();
        for q in [&lp, &rev] {
            let out = solve_feasibility(q, &cfg).unwrap();
            let c = out.certificate().expect("generated problems are solvable");
            prop_assert!(verify_certificate(q, c, 1e-9).unwrap().pass);
        }
    }

    #[test]
    fn pipeline_interpolates_and_stays_bounded(seed in any::<u64>(), n in 1usize..=4, dim in 1usize..=4) {
        let (p, _) = generate_problem(dim, n, seed).unwrap();
        let tol = Tolerances::default();
        let Outcome::Feasible(it) = interpolate(&p, &tol).unwrap() else {
            return Err(TestCaseError::fail("generated problem not solved"));
        };
        for (s, w) in p.nodes.iter().zip(&p.targets) {
            prop_assert!((it.function.evaluate(s).unwrap() - w).norm() <= 1e-6);
        }
        prop_assert!(it.realization.state_residual <= 1e-6);
        prop_assert!(it.realization.lsharp_norm <= 1.0 + 1e-12);
        prop_assert!(it.symmetrize.isometry_defect <= 1e-8);
        prop_assert!(it.symmetrize.fiber_mismatch <= 1e-7);
        let mut r = rng(seed ^ 1);
        let pts: Vec<_> = (0..200).map(|_| interior_point(&mut r, 0.999)).collect();
        prop_assert!(it.function.max_modulus(&pts).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn infeasible_problems_never_reach_realization(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s1 = interior_point(&mut r, 0.9);
        let s2 = interior_point(&mut r, 0.9);
        let c = circle_max_distance(&s1, &s2);
        prop_assume!(c < 0.9);
        let p = PickProblem::new(vec![s1, s2], vec![c64(0.0, 0.0), c64(c + 0.05, 0.0)]).unwrap();
        let infeasible = matches!(interpolate(&p, &Tolerances::default()).unwrap(), Outcome::Infeasible { .. });
        prop_assert!(infeasible);
    }
}

/// `max_omega d(Phi_omega(s), Phi_omega(t))` on a fine grid; a two-point
/// problem with a larger target distance has no solution.
fn circle_max_distance(s: &symbidisc::GPoint, t: &symbidisc::GPoint) -> f64 {
    (0..4096)
        .map(|k| {
            let w = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 4096.0);
            let (a, b) = (phi_omega(w, s).unwrap(), phi_omega(w, t).unwrap());
            (a - b).norm() / (C64::new(1.0, 0.0) - a.conj() * b).norm()
        })
        .fold(0.0, f64::max)
}
