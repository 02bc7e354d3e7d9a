//! Target-set synthesis: a λ-contractive polytope inside a seed C-set.

use serde::{Deserialize, Serialize};

use crate::lp::{lp_solve, LpBuilder, LpStatus};
use crate::{serde_util, Error, HPolytope, LinearSystem, Matrix, Result, Tolerances, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct ContractiveSpec {
    pub lambda: f64,
    pub seed: HPolytope,
    pub convergence_eps: f64,
    pub max_iters: usize,
}

impl ContractiveSpec {
    pub fn new(lambda: f64, seed: HPolytope) -> Self {
        Self {
            lambda,
            seed,
            convergence_eps: 1e-6,
            max_iters: 200,
        }
    }
}

/// The synthesized target set `P0` with its vertices and per-vertex
/// contraction witnesses `u_n` (`A v_n + B u_n ∈ λ P0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetSet {
    pub polytope: HPolytope,
    #[serde(with = "serde_util::vectors")]
    pub vertices: Vec<Vector>,
    pub lambda: f64,
    #[serde(with = "serde_util::vectors")]
    pub witnesses: Vec<Vector>,
    pub iterations: usize,
}

impl TargetSet {
    /// Rebuilds the vertex cache after deserialization.
    pub fn polytope_with_vertices(&self) -> HPolytope {
        self.polytope.clone().with_vertices(self.vertices.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractiveCheck {
    pub passed: bool,
    /// One entry per vertex; `None` where no admissible input contracts it.
    pub witnesses: Vec<Option<Vector>>,
}

impl ContractiveCheck {
    pub fn into_witnesses(self) -> Option<Vec<Vector>> {
        self.witnesses.into_iter().collect()
    }
}

/// Lifted polytope over `(x, u)` encoding `x ∈ X`, `u ∈ U`, `Ax + Bu ∈ λD`.
fn lifted(sys: &LinearSystem, d: &HPolytope, lambda: f64) -> Result<HPolytope> {
    let n = sys.state_dim();
    let m = sys.input_dim();
    let hd = d.matrix();
    let (nd, nu, nx) = (
        d.num_constraints(),
        sys.input_set.num_constraints(),
        sys.state_set.num_constraints(),
    );
    let mut h = Matrix::zeros(nd + nu + nx, n + m);
    h.view_mut((0, 0), (nd, n)).copy_from(&(hd * &sys.a));
    h.view_mut((0, n), (nd, m)).copy_from(&(hd * &sys.b));
    h.view_mut((nd, n), (nu, m)).copy_from(sys.input_set.matrix());
    h.view_mut((nd + nu, 0), (nx, n)).copy_from(sys.state_set.matrix());
    let offsets = Vector::from_iterator(
        nd + nu + nx,
        (d.offsets() * lambda)
            .iter()
            .chain(sys.input_set.offsets().iter())
            .chain(sys.state_set.offsets().iter())
            .copied(),
    );
    HPolytope::new(h, offsets)
}

/// `Q_λ(D) = {x ∈ X : ∃u ∈ U, Ax + Bu ∈ λD}`, computed by eliminating `u`.
pub fn qmap(sys: &LinearSystem, d: &HPolytope, lambda: f64, tol: &Tolerances) -> Result<HPolytope> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Argument(format!("λ must lie in [0, 1], got {lambda}")));
    }
    if d.dim() != sys.state_dim() {
        return Err(Error::Dimension(format!(
            "set is {}-D, state is {}-D",
            d.dim(),
            sys.state_dim()
        )));
    }
    lifted(sys, d, lambda)?.project_out(sys.input_dim(), tol)
}

/// Iterates `Ω_{k+1} = Q_λ(Ω_k) ∩ S0` from `Ω_0 = S0` until
/// `Ω_{k+1} ⊆ Ω_k ⊆ (1+ε) Ω_{k+1}` and the iterate certifies as
/// λ-contractive.
pub fn synth_target(sys: &LinearSystem, spec: &ContractiveSpec, tol: &Tolerances) -> Result<TargetSet> {
    if !(spec.lambda > 0.0 && spec.lambda < 1.0) {
        return Err(Error::Argument(format!("λ must lie in (0, 1), got {}", spec.lambda)));
    }
    if !(spec.convergence_eps > 0.0) {
        return Err(Error::Argument("convergence ε must be positive".into()));
    }
    if !spec.seed.is_c_set(0.0) {
        return Err(Error::Argument(
            "seed set must contain the origin in its interior".into(),
        ));
    }
    if !spec.seed.is_subset_of(&sys.state_set, tol)? {
        return Err(Error::Argument("seed set must lie inside the state constraints".into()));
    }

    let seed = spec.seed.reduce(tol)?;
    let mut omega = seed.clone();
    for iteration in 1..=spec.max_iters {
        let fail = |reason: String| Error::SynthesisFailed { iteration, reason };
        let next = match qmap(sys, &omega, spec.lambda, tol).and_then(|q| q.intersect(&seed, tol)) {
            Ok(p) => p,
            Err(Error::Empty) => return Err(fail("iterate became empty".into())),
            Err(e) => return Err(e),
        };
        if !next.is_c_set(tol.mem_tol) {
            return Err(fail("origin left the interior of the iterate".into()));
        }
        if !next.is_subset_of(&omega, tol)? {
            return Err(fail("iteration lost monotonicity".into()));
        }
        let converged = omega.is_subset_of(&next.scale(1.0 + spec.convergence_eps)?, tol)?;
        omega = next;
        if converged {
            let check = verify_contractive(sys, &omega, spec.lambda, tol)?;
            if check.passed {
                let vertices = omega.vertices(tol)?.to_vec();
                return Ok(TargetSet {
                    polytope: omega,
                    vertices,
                    lambda: spec.lambda,
                    witnesses: check.into_witnesses().expect("passed check has all witnesses"),
                    iterations: iteration,
                });
            }
        }
    }
    Err(Error::NonConvergence(spec.max_iters))
}

/// Minimum `ε` with `u ∈ U` and `A v + B u ∈ ε P`, scanning every vertex of
/// `P`. The set is λ-contractive when every vertex reaches `ε <= λ`.
pub fn verify_contractive(
    sys: &LinearSystem,
    p: &HPolytope,
    lambda: f64,
    tol: &Tolerances,
) -> Result<ContractiveCheck> {
    let m = sys.input_dim();
    let hp = p.matrix();
    let hp_off = p.offsets();
    let hb = hp * &sys.b;
    let hu = sys.input_set.matrix();
    let hu_off = sys.input_set.offsets();
    let mut witnesses = Vec::new();
    for v in p.vertices(tol)? {
        let free = hp * (&sys.a * v);
        // variables: u (m), ε
        let mut lp = LpBuilder::new(m + 1);
        lp.set_objective(m, 1.0);
        lp.le_terms(&[(m, -1.0)], 0.0);
        for i in 0..hu.nrows() {
            let mut row = vec![0.0; m + 1];
            for k in 0..m {
                row[k] = hu[(i, k)];
            }
            lp.le(&row, hu_off[i]);
        }
        for i in 0..hp.nrows() {
            let mut row = vec![0.0; m + 1];
            for k in 0..m {
                row[k] = hb[(i, k)];
            }
            row[m] = -hp_off[i];
            lp.le(&row, -free[i]);
        }
        let out = lp_solve(&lp.build(), tol.feas_tol)?;
        let witness = match (out.status, out.optimizer) {
            (LpStatus::Optimal, Some(z)) if z[m] <= lambda + tol.mem_tol => Some(z.rows(0, m).into_owned()),
            _ => None,
        };
        witnesses.push(witness);
    }
    Ok(ContractiveCheck {
        passed: witnesses.iter().all(Option::is_some),
        witnesses,
    })
}

/// Scaling test: `γ u_n ∈ U` and `γ v_n ∈ X` for every vertex/witness pair.
/// When it holds, `γ P0` is λ-contractive too.
pub fn check_scaling(
    sys: &LinearSystem,
    target: &TargetSet,
    gamma: f64,
    witnesses: &[Vector],
    tol: &Tolerances,
) -> Result<bool> {
    if !(gamma > 1.0) {
        return Err(Error::Argument(format!("scaling needs γ > 1, got {gamma}")));
    }
    if witnesses.len() != target.vertices.len() {
        return Err(Error::Dimension(format!(
            "{} witnesses for {} vertices",
            witnesses.len(),
            target.vertices.len()
        )));
    }
    for (v, u) in target.vertices.iter().zip(witnesses) {
        if !sys.input_set.contains(&(u * gamma), tol.mem_tol)? || !sys.state_set.contains(&(v * gamma), tol.mem_tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
