//! Numerical thresholds shared across the pipeline.
//!
//! Every default lives here so that callers can override them in one place
//! (the CLI maps `--tol` and `--max-iter` onto this record).

/// Tolerances and iteration budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Jacobi sweep budget for the Hermitian eigensolver.
    pub jacobi_sweeps: usize,
    /// Condition estimate above which linear solves are refused.
    pub max_condition: f64,
    /// Relative singular value threshold for rank decisions.
    pub rank_rel: f64,
    /// Band around the boundary of G used by the membership test.
    pub boundary: f64,
    /// Slack allowed when checking that an operator is a contraction.
    pub contraction_slack: f64,
    /// Minimum max-norm separation between interpolation nodes.
    pub node_separation: f64,
    /// Feasibility tolerance of the Pick solver (residual and eigenvalue floor).
    pub solver_tol: f64,
    /// Sweep budget of the Pick solver.
    pub solver_max_iter: usize,
    /// Step size below which the Pick solver is considered stalled.
    pub solver_stall: f64,
    /// Allowed Gramian mismatch when building lurking isometries.
    pub gram_tol: f64,
    /// Allowed disagreement between the two fiber-point formulas for `w`.
    pub fiber_tol: f64,
    /// Unitarity slack for operators that are supposed to be unitary.
    pub unitary_tol: f64,
    /// Eigenvalue gap below which spectral projections are merged.
    pub cluster_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi_sweeps: 30,
            max_condition: 1e14,
            rank_rel: 1e-10,
            boundary: 1e-9,
            contraction_slack: 1e-10,
            node_separation: 1e-8,
            solver_tol: 1e-9,
            solver_max_iter: 50_000,
            solver_stall: 1e-12,
            gram_tol: 1e-6,
            fiber_tol: 1e-7,
            unitary_tol: 1e-10,
            cluster_gap: 1e-8,
        }
    }
}
