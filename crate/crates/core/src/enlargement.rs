//! Iterative enlargement of the domain of attraction: for each hold length
//! `j`, a chain of scalings `1 = a_{j,0} < a_{j,1} < ...` such that every
//! vertex of `a_{j,ℓ} P0` can be driven into `a_{j,ℓ-1} P0` by holding one
//! admissible input for `j` steps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contractive::TargetSet;
use crate::lp::{lp_solve, LpBuilder, LpStatus};
use crate::polytope::convex_weights;
use crate::{serde_util, Error, LinearSystem, Matrix, Result, Tolerances, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnlargeOptions {
    /// Also keep the intermediate states `1..j-1` of every vertex hold inside `X`.
    pub strict_intermediate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnlargeStep {
    pub scale: f64,
    /// One input per vertex of `P0`.
    pub controls: Vec<Vector>,
}

/// Witness inputs for one grid entry `(j, ℓ >= 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexControls(#[serde(with = "serde_util::vectors")] pub Vec<Vector>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaledFamily {
    pub target: TargetSet,
    pub j_max: usize,
    pub a_bar: f64,
    pub options: EnlargeOptions,
    /// `scales[j - 1][ℓ] = a_{j,ℓ}`; every chain starts at 1.
    pub scales: Vec<Vec<f64>>,
    pub a_max: f64,
    /// `controls[j - 1][ℓ - 1]` are the vertex inputs certifying `(j, ℓ)`.
    pub controls: Vec<Vec<VertexControls>>,
}

impl ScaledFamily {
    pub fn scale(&self, j: usize, l: usize) -> Option<f64> {
        self.scales.get(j.checked_sub(1)?)?.get(l).copied()
    }

    /// `ℓ_j`, the index of the last set in chain `j`.
    pub fn chain_top(&self, j: usize) -> usize {
        self.scales[j - 1].len() - 1
    }

    pub fn vertex_controls(&self, j: usize, l: usize) -> Option<&[Vector]> {
        let chain = self.controls.get(j.checked_sub(1)?)?;
        Some(&chain.get(l.checked_sub(1)?)?.0)
    }

    /// Every `(j, ℓ)` in chain order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.scales
            .iter()
            .enumerate()
            .flat_map(|(jm1, chain)| (0..chain.len()).map(move |l| (jm1 + 1, l)))
    }

    pub fn set_count(&self) -> usize {
        self.scales.iter().map(Vec::len).sum()
    }
}

fn hold_rows(
    lp: &mut LpBuilder,
    rows: &Matrix,
    offsets: &Vector,
    scale_coeff: &Vector,
    input_coeff: &Matrix,
    u_offset: usize,
    rhs_scale: f64,
) {
    let m = input_coeff.ncols();
    for i in 0..rows.nrows() {
        let mut terms = Vec::with_capacity(m + 1);
        terms.push((0, scale_coeff[i]));
        for k in 0..m {
            terms.push((u_offset + k, input_coeff[(i, k)]));
        }
        lp.le_terms(&terms, rhs_scale * offsets[i]);
    }
}

/// Solves `max a` over `(a, u_1..u_N)` subject to `a >= a_cur + strict_tol`,
/// `a v_n ∈ X`, `u_n ∈ U` and `A^j a v_n + Σ_{i=1}^{j} A^{i-1} B u_n ∈ a_cur P0`.
/// Returns `None` when infeasible.
pub fn enlarge_step(
    sys: &LinearSystem,
    target: &TargetSet,
    j: usize,
    a_cur: f64,
    options: EnlargeOptions,
    tol: &Tolerances,
) -> Result<Option<EnlargeStep>> {
    if j == 0 {
        return Err(Error::Argument("hold length must be >= 1".into()));
    }
    if !(a_cur >= 1.0) {
        return Err(Error::Argument(format!("current scaling must be >= 1, got {a_cur}")));
    }
    let m = sys.input_dim();
    let count = target.vertices.len();
    let maps = sys.hold_maps_upto(j);
    let (aj, sj) = &maps[j - 1];
    let hx = sys.state_set.matrix();
    let hx_off = sys.state_set.offsets();
    let hu = sys.input_set.matrix();
    let hu_off = sys.input_set.offsets();
    let h0 = target.polytope.matrix();
    let h0_off = target.polytope.offsets();
    let h0_s = h0 * sj;
    let hx_s: Vec<Matrix> = maps.iter().map(|(_, s)| hx * s).collect();

    let mut lp = LpBuilder::new(1 + count * m);
    lp.set_objective(0, -1.0);
    lp.le_terms(&[(0, -1.0)], -(a_cur + tol.strict_tol));
    for (idx, v) in target.vertices.iter().enumerate() {
        let u_off = 1 + idx * m;
        hold_rows(
            &mut lp,
            hx,
            &hx_off,
            &(hx * v),
            &Matrix::zeros(hx.nrows(), m),
            u_off,
            1.0,
        );
        hold_rows(&mut lp, hu, &hu_off, &Vector::zeros(hu.nrows()), hu, u_off, 1.0);
        hold_rows(&mut lp, h0, &h0_off, &(h0 * (aj * v)), &h0_s, u_off, a_cur);
        if options.strict_intermediate {
            for i in 1..j {
                let (ai, _) = &maps[i - 1];
                hold_rows(&mut lp, hx, &hx_off, &(hx * (ai * v)), &hx_s[i - 1], u_off, 1.0);
            }
        }
    }
    let out = lp_solve(&lp.build(), tol.feas_tol)?;
    match out.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Internal(format!(
            "enlargement LP unbounded at j = {j}; is X bounded?"
        ))),
        LpStatus::Optimal => {
            let z = out.optimizer.expect("optimal outcome has an optimizer");
            let controls = (0..count).map(|idx| z.rows(1 + idx * m, m).into_owned()).collect();
            Ok(Some(EnlargeStep { scale: z[0], controls }))
        }
    }
}

fn build_chain(
    sys: &LinearSystem,
    target: &TargetSet,
    j: usize,
    a_bar: f64,
    options: EnlargeOptions,
    tol: &Tolerances,
) -> Result<(Vec<f64>, Vec<VertexControls>)> {
    let mut scales = vec![1.0];
    let mut controls = Vec::new();
    loop {
        let a_cur = *scales.last().expect("chain is never empty");
        match enlarge_step(sys, target, j, a_cur, options, tol)? {
            Some(step) if step.scale >= a_cur + a_bar => {
                scales.push(step.scale);
                controls.push(VertexControls(step.controls));
            }
            _ => return Ok((scales, controls)),
        }
    }
}

/// Runs the enlargement chain for every `j = 1..=j_max`. Chains are
/// independent and evaluated in parallel; results are ordered by `j`.
pub fn build_family(
    sys: &LinearSystem,
    target: &TargetSet,
    j_max: usize,
    a_bar: f64,
    options: EnlargeOptions,
    tol: &Tolerances,
) -> Result<ScaledFamily> {
    if j_max == 0 {
        return Err(Error::Argument("j_max must be >= 1".into()));
    }
    if !(a_bar > 0.0) {
        return Err(Error::Argument(format!("ā must be > 0, got {a_bar}")));
    }
    let chains: Vec<(Vec<f64>, Vec<VertexControls>)> = (1..=j_max)
        .into_par_iter()
        .map(|j| build_chain(sys, target, j, a_bar, options, tol))
        .collect::<Result<_>>()?;
    let (scales, controls): (Vec<_>, Vec<_>) = chains.into_iter().unzip();
    let a_max = scales.iter().flat_map(|c| c.iter().copied()).fold(1.0f64, f64::max);
    Ok(ScaledFamily {
        target: target.clone(),
        j_max,
        a_bar,
        options,
        scales,
        a_max,
        controls,
    })
}

/// For `x ∈ P_{j,ℓ}` writes `x = Σ μ_n a_{j,ℓ} v_n` and returns the blended
/// input `u = Σ μ_n u_n` together with the endpoint after holding it `j` steps.
pub fn blend_witness(
    sys: &LinearSystem,
    family: &ScaledFamily,
    j: usize,
    l: usize,
    x: &Vector,
    tol: &Tolerances,
) -> Result<(Vector, Vector)> {
    if l == 0 {
        return Err(Error::Precondition("ℓ must be >= 1".into()));
    }
    let a = family
        .scale(j, l)
        .ok_or_else(|| Error::Precondition(format!("no set ({j}, {l}) in the family")))?;
    let controls = family
        .vertex_controls(j, l)
        .ok_or_else(|| Error::Precondition(format!("no witness controls for ({j}, {l})")))?;
    let p0 = &family.target.polytope;
    if p0.gauge(x)? > a + tol.mem_tol {
        return Err(Error::Precondition(format!("x is outside P_({j},{l})")));
    }
    let points: Vec<Vector> = family.target.vertices.iter().map(|v| v * a).collect();
    let exact = convex_weights(&points, x, 0.0, tol)?;
    let mu = match exact {
        Some(mu) => Some(mu),
        None => convex_weights(&points, x, tol.mem_tol, tol)?,
    }
    .ok_or_else(|| Error::Precondition(format!("x is not a combination of P_({j},{l}) vertices")))?;
    let mut u = Vector::zeros(sys.input_dim());
    for (w, un) in mu.iter().zip(controls) {
        u += un * *w;
    }
    let (aj, sj) = sys.hold_maps(j)?;
    let next = aj * x + sj * &u;
    Ok((u, next))
}

/// Re-checks the constraints that certified grid entry `(j, ℓ >= 1)` with the
/// stored vertex inputs: `a v_n ∈ X`, `u_n ∈ U`, endpoint in `a_{j,ℓ-1} P0`.
pub fn certify_entry(sys: &LinearSystem, family: &ScaledFamily, j: usize, l: usize, tol: &Tolerances) -> Result<bool> {
    let (Some(a), Some(a_prev), Some(controls)) = (
        family.scale(j, l),
        l.checked_sub(1).and_then(|lp| family.scale(j, lp)),
        family.vertex_controls(j, l),
    ) else {
        return Err(Error::Precondition(format!("no certified entry ({j}, {l})")));
    };
    if controls.len() != family.target.vertices.len() {
        return Ok(false);
    }
    let maps = sys.hold_maps_upto(j);
    let landing = family.target.polytope.scale(a_prev)?;
    for (v, u) in family.target.vertices.iter().zip(controls) {
        let start = v * a;
        if !sys.state_set.contains(&start, tol.mem_tol)? || !sys.input_set.contains(u, tol.mem_tol)? {
            return Ok(false);
        }
        let (aj, sj) = &maps[j - 1];
        if !landing.contains(&(aj * &start + sj * u), tol.mem_tol)? {
            return Ok(false);
        }
        if family.options.strict_intermediate {
            for (ai, si) in &maps[..j - 1] {
                if !sys.state_set.contains(&(ai * &start + si * u), tol.mem_tol)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
