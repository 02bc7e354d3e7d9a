use serde::{Deserialize, Serialize};

/// Numerical tolerances shared across the pipeline.
///
/// Geometric tolerances (`membership`, `dedupe`) sit two orders above the LP
/// feasibility tolerance so set-membership decisions are not flipped by
/// solver round-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Tolerances {
    /// LP primal feasibility / optimality tolerance.
    pub feas_tol: f64,
    /// Slack allowed in `H x <= h` membership tests.
    pub mem_tol: f64,
    /// Two vertices closer than this (max-norm) are the same vertex.
    pub dedupe_tol: f64,
    /// A row is dropped when its support over the other rows is within this of its offset.
    pub red_tol: f64,
    /// Determinant threshold below which a square system is singular.
    pub singular_tol: f64,
    /// Encodes open inequalities `a > b` as `a >= b + strict_tol`.
    pub strict_tol: f64,
    /// The ε of the `Ω' ⊆ Ω ⊆ (1+ε)Ω'` convergence sandwich.
    pub convergence_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            mem_tol: 1e-7,
            dedupe_tol: 1e-7,
            red_tol: 1e-9,
            singular_tol: 1e-12,
            strict_tol: 1e-9,
            convergence_eps: 1e-6,
        }
    }
}
