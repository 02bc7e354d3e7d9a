use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::Rng;
use stc_core::contractive::{check_scaling, verify_contractive};
use stc_core::enlargement::{blend_witness, certify_entry};
use stc_core::graph::{build_graph, edge_cost, EdgeKind, NodeId};
use stc_core::{LinearSystem, Tolerances, Vector};

use crate::artifact::SynthesisArtifact;
use crate::error::CliResult;
use crate::sampling::{sample_hull, trial_rng};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, failures: Vec<String>, total: usize, what: &str) -> Check {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{total} {what} ok")
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        format!(
            "{} of {total} {what} failed; first: {}",
            failures.len(),
            shown.join("; ")
        )
    };
    Check { name, passed, detail }
}

pub fn run(artifact: &Path, samples: usize, seed: u64) -> CliResult<Report> {
    let art = SynthesisArtifact::load(artifact)?;
    verify_artifact(&art, samples, seed)
}

/// Runs every self-consistency check on a loaded artifact.
pub fn verify_artifact(art: &SynthesisArtifact, samples: usize, seed: u64) -> CliResult<Report> {
    let sys = art.system()?;
    let tol = art.config.tolerances;
    let checks = vec![
        contractive(art, &sys, &tol)?,
        scaling(art, &sys, &tol)?,
        family_grid(art),
        chain_certificates(art, &sys, &tol)?,
        blend_sampling(art, &sys, &tol, samples, seed)?,
        graph_structure(art),
        edge_certificates(art, &sys, samples, seed)?,
        periodic_law(art, &sys, &tol)?,
    ];
    Ok(Report { checks })
}

fn contractive(art: &SynthesisArtifact, sys: &LinearSystem, tol: &Tolerances) -> CliResult<Check> {
    let t = &art.target;
    let p0 = t.polytope_with_vertices();
    let lambda_p0 = p0.scale(t.lambda)?;
    let mut failures = Vec::new();
    if !verify_contractive(sys, &p0, t.lambda, tol)?.passed {
        failures.push("vertex LP found a vertex that cannot contract".to_string());
    }
    for (n, (v, u)) in t.vertices.iter().zip(&t.witnesses).enumerate() {
        if !sys.input_set.contains(u, tol.mem_tol)? || !lambda_p0.contains(&sys.step(v, u), tol.mem_tol)? {
            failures.push(format!("stored witness {n} does not contract its vertex"));
        }
    }
    Ok(check("contractive", failures, t.vertices.len(), "vertices"))
}

/// Largest `γ` with `γ u_n ∈ U` and `γ v_n ∈ X` for every stored witness.
pub fn admissible_gamma(sys: &LinearSystem, art: &SynthesisArtifact) -> f64 {
    let t = &art.target;
    let mut best = f64::INFINITY;
    let mut tighten = |row_dot: f64, offset: f64| {
        if row_dot > 0.0 {
            best = best.min(offset / row_dot);
        }
    };
    for (v, u) in t.vertices.iter().zip(&t.witnesses) {
        let (hu, hu_off) = (sys.input_set.matrix(), sys.input_set.offsets());
        let du = hu * u;
        for i in 0..du.len() {
            tighten(du[i], hu_off[i]);
        }
        let (hx, hx_off) = (sys.state_set.matrix(), sys.state_set.offsets());
        let dx = hx * v;
        for i in 0..dx.len() {
            tighten(dx[i], hx_off[i]);
        }
    }
    best
}

fn scaling(art: &SynthesisArtifact, sys: &LinearSystem, tol: &Tolerances) -> CliResult<Check> {
    let t = &art.target;
    let p0 = t.polytope_with_vertices();
    let top = admissible_gamma(sys, art).min(1e6);
    let mut gammas: Vec<f64> = (1..=10).map(|k| 1.0 + (top - 1.0) * k as f64 / 10.0).collect();
    gammas.extend([top * 1.01, 2.0 * top]);
    gammas.retain(|&g| g > 1.0);
    let mut failures = Vec::new();
    let mut admitted = 0;
    for &g in &gammas {
        if check_scaling(sys, t, g, &t.witnesses, tol)? {
            admitted += 1;
            let scaled = p0.scale(g)?;
            if !verify_contractive(sys, &scaled, t.lambda, tol)?.passed {
                failures.push(format!("γ = {g} passed the scaling test but is not contractive"));
            }
        }
    }
    let mut c = check("scaling", failures, gammas.len(), "scalings");
    c.detail
        .push_str(&format!(" ({admitted} admitted by the witness test, γ* = {top})"));
    Ok(c)
}

fn family_grid(art: &SynthesisArtifact) -> Check {
    let f = &art.family;
    let mut failures = Vec::new();
    if f.scales.len() != f.j_max {
        failures.push(format!("{} chains for j_max = {}", f.scales.len(), f.j_max));
    }
    for (jm1, chain) in f.scales.iter().enumerate() {
        let j = jm1 + 1;
        if chain.first() != Some(&1.0) {
            failures.push(format!("chain {j} does not start at 1"));
        }
        for (l, w) in chain.windows(2).enumerate() {
            if !(w[1] - w[0] >= f.a_bar) {
                failures.push(format!("a[{j}][{}] - a[{j}][{l}] = {} < ā", l + 1, w[1] - w[0]));
            }
        }
        if f.controls.get(jm1).map(Vec::len) != Some(chain.len() - 1) {
            failures.push(format!("chain {j} has a missing or extra certificate"));
        }
    }
    let max = f.scales.iter().flatten().copied().fold(1.0, f64::max);
    if max != f.a_max {
        failures.push(format!("a_max = {} but the largest scale is {max}", f.a_max));
    }
    check("family-grid", failures, f.scales.len(), "chains")
}

fn chain_certificates(art: &SynthesisArtifact, sys: &LinearSystem, tol: &Tolerances) -> CliResult<Check> {
    let mut failures = Vec::new();
    let mut total = 0;
    for (j, l) in art.family.indices().filter(|&(_, l)| l >= 1) {
        total += 1;
        if !certify_entry(sys, &art.family, j, l, tol)? {
            failures.push(format!("({j},{l})"));
        }
    }
    Ok(check("chain-certificates", failures, total, "entries"))
}

fn blend_sampling(
    art: &SynthesisArtifact,
    sys: &LinearSystem,
    tol: &Tolerances,
    samples: usize,
    seed: u64,
) -> CliResult<Check> {
    let f = &art.family;
    let entries: Vec<(usize, usize)> = f.indices().filter(|&(_, l)| l >= 1).collect();
    let mut failures = Vec::new();
    if !entries.is_empty() {
        let mut rng = trial_rng(seed, 1);
        for _ in 0..samples {
            let (j, l) = entries[rng.random_range(0..entries.len())];
            let a = f.scale(j, l).expect("listed entry");
            let a_prev = f.scale(j, l - 1).expect("listed entry");
            let points: Vec<Vector> = f.target.vertices.iter().map(|v| v * a).collect();
            let x = sample_hull(&mut rng, &points);
            let (u, end) = blend_witness(sys, f, j, l, &x, tol)?;
            let landing = f.target.polytope.scale(a_prev)?;
            if !sys.input_set.contains(&u, tol.mem_tol)? || !landing.contains(&end, tol.mem_tol)? {
                failures.push(format!("({j},{l}) at {:?}", x.as_slice()));
            }
        }
    }
    Ok(check("blend-sampling", failures, samples, "samples"))
}

fn graph_structure(art: &SynthesisArtifact) -> Check {
    let f = &art.family;
    let g = &art.graph;
    let mut failures = Vec::new();
    if let Err(e) = art.check_consistency() {
        failures.push(e);
    }
    for e in g.edges() {
        let ok = match (e.kind, e.from, e.to) {
            (EdgeKind::Terminal, NodeId::Set { l: 0, .. }, NodeId::Terminal) => e.cost == 0.0 && e.steps == 0,
            (EdgeKind::Chain, NodeId::Set { j, l }, NodeId::Set { j: jt, l: lt }) => {
                jt == j && l >= 1 && lt == l - 1 && expected_cost(art, e.from, e.to, jt) == Some(e.cost) && e.steps == j
            }
            (EdgeKind::Cross, NodeId::Set { j, l }, NodeId::Set { j: jt, l: lt }) => {
                let bracket = match (f.scale(j, l), f.scale(jt, lt), f.scale(jt, lt + 1)) {
                    (Some(a), Some(lo), Some(hi)) => lo < a && a <= hi,
                    _ => false,
                };
                jt != j && bracket && expected_cost(art, e.from, e.to, jt) == Some(e.cost) && e.steps == jt
            }
            _ => false,
        };
        if !ok {
            failures.push(format!("{} -> {} ({:?})", e.from, e.to, e.kind));
        }
    }
    match build_graph(f, g.p, g.q) {
        Ok(rebuilt) => {
            let have: BTreeSet<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.from, e.to)).collect();
            for e in rebuilt.edges() {
                if !have.contains(&(e.from, e.to)) {
                    failures.push(format!("missing edge {} -> {}", e.from, e.to));
                }
            }
        }
        Err(e) => failures.push(format!("graph cannot be rebuilt: {e}")),
    }
    if !g.shortest_paths().all_reach_terminal() {
        failures.push("some node cannot reach s_f".into());
    }
    check("graph-structure", failures, g.edges().len(), "edges")
}

fn expected_cost(art: &SynthesisArtifact, from: NodeId, to: NodeId, steps: usize) -> Option<f64> {
    let a_from = art.graph.scale_of(from)?;
    let a_to = art.graph.scale_of(to)?;
    edge_cost(art.graph.p, art.graph.q, steps, a_from, a_to).ok()
}

fn edge_certificates(art: &SynthesisArtifact, sys: &LinearSystem, samples: usize, seed: u64) -> CliResult<Check> {
    let cl = art.closed_loop(sys, &art.graph)?;
    let edges: Vec<_> = art
        .graph
        .edges()
        .iter()
        .filter(|e| e.kind != EdgeKind::Terminal)
        .collect();
    let mut failures = Vec::new();
    if !edges.is_empty() {
        let mut rng = trial_rng(seed, 2);
        for _ in 0..samples {
            let e = edges[rng.random_range(0..edges.len())];
            let a = art.graph.scale_of(e.from).expect("set node");
            let points: Vec<Vector> = art.target.vertices.iter().map(|v| v * a).collect();
            let x = sample_hull(&mut rng, &points);
            match cl.plan_input(&x, e.to) {
                Ok((_, eps)) if eps < 1.0 => {}
                Ok((_, eps)) => failures.push(format!("{} -> {}: ε = {eps}", e.from, e.to)),
                Err(err) => failures.push(format!("{} -> {}: {err}", e.from, e.to)),
            }
        }
    }
    Ok(check("edge-certificates", failures, samples, "samples"))
}

fn periodic_law(art: &SynthesisArtifact, sys: &LinearSystem, tol: &Tolerances) -> CliResult<Check> {
    let law = &art.law;
    let t = &art.target;
    let mut failures = Vec::new();
    if !(law.epsilon_star < 1.0) || law.j_hat == 0 || law.j_hat > art.family.j_max {
        failures.push(format!("ĵ = {}, ε* = {}", law.j_hat, law.epsilon_star));
    } else if law.vertex_inputs.len() != t.vertices.len() {
        failures.push("vertex input count differs from the vertex count".into());
    } else {
        let (aj, sj) = sys.hold_maps(law.j_hat)?;
        for (n, (v, u)) in t.vertices.iter().zip(&law.vertex_inputs).enumerate() {
            let end = t.polytope.gauge(&(&aj * v + &sj * u))?;
            if !sys.input_set.contains(u, tol.mem_tol)? || end > law.epsilon_star + tol.mem_tol {
                failures.push(format!("vertex {n}"));
            }
        }
    }
    Ok(check("periodic-law", failures, t.vertices.len(), "vertex certificates"))
}
