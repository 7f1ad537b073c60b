//! Dense complex linear algebra: eigensolvers, factorizations and solves.
//!
//! Everything here is a pure function on value-semantic matrices.

mod eigen;
mod factor;
mod lu;
mod matrix;
mod schur;

pub(crate) use eigen::psd_project_with_min;
pub use eigen::{herm_eig, herm_eig_with_budget, operator_norm, psd_factor, psd_project, HermEig};
pub use factor::{
    gram_schmidt_qr, nearest_isometry, nearest_isometry_with, orthonormal_complement, right_pseudo_solve, Qr,
};
pub use lu::{solve_linear, solve_linear_with, Lu};
pub use matrix::{c64, inner, vec_norm, CMatrix, HermitianMatrix, C64};
pub use schur::{normal_eig, schur, triangular_eigenvectors, Schur};

/// `max |A* A - I|` entrywise.
pub fn isometry_defect(q: &CMatrix) -> f64 {
    (&q.adjoint().matmul(q) - &CMatrix::identity(q.cols())).max_abs()
}
