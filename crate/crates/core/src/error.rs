use thiserror::Error;

/// Failures raised by the numerical kernel and the interpolation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NonConvergence { sweeps: usize, off: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("matrix is rank deficient (sigma_min / sigma_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("linear system is ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("operator is not a contraction (norm {norm})")]
    NotAContraction { norm: f64 },

    #[error("point lies outside the symmetrized bidisc: {0}")]
    OutOfDomain(String),

    #[error("denominator vanishes: {0}")]
    PoleAtBoundary(String),

    #[error("nodes {i} and {j} coincide (separation {separation:e})")]
    DuplicateNodes { i: usize, j: usize, separation: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("symmetrization failed: model identity violated (mismatch {mismatch:e})")]
    SymmetrizationFailed { mismatch: f64 },

    #[error("operator is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("model Gramians disagree (mismatch {mismatch:e})")]
    ModelInconsistent { mismatch: f64 },

    #[error("matrices do not commute (commutator norm {norm:e})")]
    NotCommuting { norm: f64 },

    #[error("resolvent 2 - omega S1 is singular at omega = {omega}")]
    SingularResolvent { omega: String },

    #[error("commuting pair is not diagonalizable (eigenvector condition {cond:e})")]
    NotDiagonalizable { cond: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
