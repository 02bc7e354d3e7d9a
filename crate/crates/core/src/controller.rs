//! Online self-triggered controller: locate the smallest certified set that
//! holds the state, follow the first hop of its shortest path with a held
//! input, and once inside `P0` switch to a periodic law with period `ĵ`.

use serde::{Deserialize, Serialize};

use crate::contractive::TargetSet;
use crate::enlargement::ScaledFamily;
use crate::graph::{CompositeGraph, NodeId, ShortestPaths};
use crate::lp::{lp_solve, LpBuilder, LpStatus};
use crate::{serde_util, Error, LinearSystem, Matrix, Result, Tolerances, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Phase {
    SelfTriggered,
    Periodic,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::SelfTriggered => "self-triggered",
            Phase::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventDecision {
    /// Located node `(j*, ℓ*)`.
    pub node: NodeId,
    pub located_scale: f64,
    /// First hop `(j_p, ℓ_p)` of the shortest path.
    pub next_node: NodeId,
    pub steps: usize,
    pub input: Vector,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodicLaw {
    pub j_hat: usize,
    pub epsilon_star: f64,
    /// Vertex inputs certifying `ε*` at `ĵ`, one per vertex of `P0`.
    #[serde(with = "serde_util::vectors")]
    pub vertex_inputs: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    /// Event time `k_m`.
    pub k: usize,
    pub phase: Phase,
    /// Gauge of `x(k_m)` with respect to `P0`.
    pub gauge: f64,
    /// Located node and first hop; `None` in the periodic phase.
    pub node: Option<NodeId>,
    pub next_node: Option<NodeId>,
    pub located_scale: Option<f64>,
    /// Hold length actually applied (may be cut short by the step budget).
    pub steps: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    /// `x(0), ..., x(K)`.
    pub states: Vec<Vector>,
    /// `u(0), ..., u(K-1)`.
    pub inputs: Vec<Vector>,
    pub events: Vec<EventRecord>,
    /// First event time with `x(k_m) ∈ P0`.
    pub termination_step: usize,
}

impl SimulationTrace {
    pub fn event_times(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.k).collect()
    }

    pub fn visited_nodes(&self) -> Vec<NodeId> {
        self.events.iter().filter_map(|e| e.node).collect()
    }

    pub fn self_triggered_events(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.iter().filter(|e| e.phase == Phase::SelfTriggered)
    }

    /// Located scalings `a_{j*_m, ℓ*_m}` of the self-triggered phase.
    pub fn located_scales(&self) -> Vec<f64> {
        self.self_triggered_events().filter_map(|e| e.located_scale).collect()
    }

    /// Mean hold length over self-triggered events; `None` without any.
    pub fn mean_inter_event(&self) -> Option<f64> {
        let (n, total) = self
            .self_triggered_events()
            .fold((0usize, 0usize), |(n, t), e| (n + 1, t + e.steps));
        (n > 0).then(|| total as f64 / n as f64)
    }
}

/// Held-input LP: minimise `ε` over `(u, ε)` subject to `u ∈ U`,
/// `0 <= ε <= 1 - strict_tol` and `H0 (A^j x + S_j u) <= ε · scale · h0`.
/// With `strict`, the states `1..j-1` of the hold must also stay in `X`.
#[allow(clippy::too_many_arguments)]
fn min_eps_hold(
    sys: &LinearSystem,
    maps: &[(Matrix, Matrix)],
    x: &Vector,
    target: &TargetSet,
    j: usize,
    scale: f64,
    strict: bool,
    tol: &Tolerances,
) -> Result<Option<(Vector, f64)>> {
    let m = sys.input_dim();
    let eps = m;
    let mut lp = LpBuilder::new(m + 1);
    lp.set_objective(eps, 1.0);
    lp.le_terms(&[(eps, 1.0)], 1.0 - tol.strict_tol);
    lp.le_terms(&[(eps, -1.0)], 0.0);
    add_input_rows(&mut lp, sys, 0);

    let (aj, sj) = &maps[j - 1];
    let h0 = target.polytope.matrix();
    let h0_off = target.polytope.offsets();
    let lhs = h0 * sj;
    let free = h0 * (aj * x);
    for i in 0..h0.nrows() {
        let mut terms: Vec<(usize, f64)> = (0..m).map(|k| (k, lhs[(i, k)])).collect();
        terms.push((eps, -scale * h0_off[i]));
        lp.le_terms(&terms, -free[i]);
    }
    if strict {
        add_intermediate_rows(&mut lp, sys, &maps[..j - 1], x, 0);
    }
    let out = lp_solve(&lp.build(), tol.feas_tol)?;
    Ok(match out.status {
        LpStatus::Optimal => {
            let z = out.optimizer.expect("optimal outcome has an optimizer");
            Some((z.rows(0, m).into_owned(), z[eps].max(0.0)))
        }
        _ => None,
    })
}

fn add_input_rows(lp: &mut LpBuilder, sys: &LinearSystem, u_off: usize) {
    let hu = sys.input_set.matrix();
    let hu_off = sys.input_set.offsets();
    for i in 0..hu.nrows() {
        let terms: Vec<(usize, f64)> = (0..hu.ncols()).map(|k| (u_off + k, hu[(i, k)])).collect();
        lp.le_terms(&terms, hu_off[i]);
    }
}

fn add_intermediate_rows(lp: &mut LpBuilder, sys: &LinearSystem, maps: &[(Matrix, Matrix)], x: &Vector, u_off: usize) {
    let hx = sys.state_set.matrix();
    let hx_off = sys.state_set.offsets();
    for (ai, si) in maps {
        let lhs = hx * si;
        let free = hx * (ai * x);
        for r in 0..hx.nrows() {
            let terms: Vec<(usize, f64)> = (0..lhs.ncols()).map(|k| (u_off + k, lhs[(r, k)])).collect();
            lp.le_terms(&terms, hx_off[r] - free[r]);
        }
    }
}

/// Vertex LP at hold length `j`: one input per vertex of `P0`, common `ε`.
fn periodic_vertex_lp(
    sys: &LinearSystem,
    target: &TargetSet,
    maps: &[(Matrix, Matrix)],
    j: usize,
    strict: bool,
    tol: &Tolerances,
) -> Result<Option<(f64, Vec<Vector>)>> {
    let m = sys.input_dim();
    let count = target.vertices.len();
    let eps = count * m;
    let mut lp = LpBuilder::new(eps + 1);
    lp.set_objective(eps, 1.0);
    lp.le_terms(&[(eps, 1.0)], 1.0 - tol.strict_tol);
    lp.le_terms(&[(eps, -1.0)], 0.0);
    let (aj, sj) = &maps[j - 1];
    let h0 = target.polytope.matrix();
    let h0_off = target.polytope.offsets();
    let lhs = h0 * sj;
    for (n, v) in target.vertices.iter().enumerate() {
        let u_off = n * m;
        add_input_rows(&mut lp, sys, u_off);
        let free = h0 * (aj * v);
        for i in 0..h0.nrows() {
            let mut terms: Vec<(usize, f64)> = (0..m).map(|k| (u_off + k, lhs[(i, k)])).collect();
            terms.push((eps, -h0_off[i]));
            lp.le_terms(&terms, -free[i]);
        }
        if strict {
            add_intermediate_rows(&mut lp, sys, &maps[..j - 1], v, u_off);
        }
    }
    let out = lp_solve(&lp.build(), tol.feas_tol)?;
    Ok(match out.status {
        LpStatus::Optimal => {
            let z = out.optimizer.expect("optimal outcome has an optimizer");
            let inputs = (0..count).map(|n| z.rows(n * m, m).into_owned()).collect();
            Some((z[eps].max(0.0), inputs))
        }
        _ => None,
    })
}

/// Solves the vertex LP for every `j = 1..=j_max` and keeps the largest
/// feasible hold length.
pub fn synth_periodic(
    sys: &LinearSystem,
    target: &TargetSet,
    j_max: usize,
    strict: bool,
    tol: &Tolerances,
) -> Result<PeriodicLaw> {
    if j_max == 0 {
        return Err(Error::Argument("j_max must be >= 1".into()));
    }
    let maps = sys.hold_maps_upto(j_max);
    let mut best = None;
    for j in 1..=j_max {
        if let Some((eps, inputs)) = periodic_vertex_lp(sys, target, &maps, j, strict, tol)? {
            best = Some(PeriodicLaw {
                j_hat: j,
                epsilon_star: eps,
                vertex_inputs: inputs,
            });
        }
    }
    best.ok_or_else(|| Error::Precondition("no hold length admits a periodic law; is P0 contractive?".into()))
}

/// Offline data bundled for online use, with shortest paths and the
/// locate order precomputed.
#[derive(Debug, Clone)]
pub struct ClosedLoop<'a> {
    pub sys: &'a LinearSystem,
    pub family: &'a ScaledFamily,
    pub graph: &'a CompositeGraph,
    pub law: &'a PeriodicLaw,
    pub tol: Tolerances,
    paths: ShortestPaths,
    // set nodes sorted by (a, cost to go, id)
    order: Vec<(f64, f64, NodeId)>,
    maps: Vec<(Matrix, Matrix)>,
}

impl<'a> ClosedLoop<'a> {
    pub fn new(
        sys: &'a LinearSystem,
        family: &'a ScaledFamily,
        graph: &'a CompositeGraph,
        law: &'a PeriodicLaw,
        tol: Tolerances,
    ) -> Result<Self> {
        let paths = graph.shortest_paths();
        let mut order = Vec::with_capacity(family.set_count());
        for (j, l) in family.indices() {
            let id = NodeId::Set { j, l };
            let a = family.scale(j, l).expect("index from the family");
            let cost = paths
                .cost_to_go(graph, id)
                .ok_or_else(|| Error::NoPath(format!("{id} cannot reach s_f")))?;
            order.push((a, cost, id));
        }
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)));
        let maps = sys.hold_maps_upto(family.j_max.max(law.j_hat));
        Ok(Self {
            sys,
            family,
            graph,
            law,
            tol,
            paths,
            order,
            maps,
        })
    }

    pub fn paths(&self) -> &ShortestPaths {
        &self.paths
    }

    fn strict(&self) -> bool {
        self.family.options.strict_intermediate
    }

    fn target(&self) -> &TargetSet {
        &self.family.target
    }

    /// Node with the smallest `a_{j,ℓ} >= Ψ(x) - mem_tol`; ties go to the
    /// cheaper cost-to-go, then to the smaller `(j, ℓ)`.
    pub fn locate(&self, x: &Vector) -> Result<(NodeId, f64)> {
        let g = self.target().polytope.gauge(x)?;
        if g > self.family.a_max + self.tol.mem_tol {
            return Err(Error::OutsideDomain {
                gauge: g,
                a_max: self.family.a_max,
            });
        }
        let idx = self.order.partition_point(|(a, _, _)| *a < g - self.tol.mem_tol);
        let (a, _, id) = self.order.get(idx).copied().ok_or(Error::OutsideDomain {
            gauge: g,
            a_max: self.family.a_max,
        })?;
        Ok((id, a))
    }

    /// Held input steering `x` into `ε · P_{j_p,ℓ_p}` with minimal `ε`.
    pub fn plan_input(&self, x: &Vector, target: NodeId) -> Result<(Vector, f64)> {
        let NodeId::Set { j, l } = target else {
            return Err(Error::Precondition("cannot plan a hold into s_f".into()));
        };
        let scale = self
            .family
            .scale(j, l)
            .ok_or_else(|| Error::Precondition(format!("{target} is not in the family")))?;
        min_eps_hold(
            self.sys,
            &self.maps,
            x,
            self.target(),
            j,
            scale,
            self.strict(),
            &self.tol,
        )?
        .ok_or_else(|| Error::EdgeCertificate(format!("no admissible hold into {target}")))
    }

    /// One self-triggered event. The caller must have checked that `x` is
    /// outside `P0`.
    pub fn step_decision(&self, x: &Vector) -> Result<EventDecision> {
        let (node, located_scale) = self.locate(x)?;
        let path = self.paths.path(self.graph, node)?;
        let hop = path
            .first_hop
            .ok_or_else(|| Error::Internal("path from a set node has no hop".into()))?;
        if hop.to == NodeId::Terminal {
            return Err(Error::Precondition(format!("{node} lies in P0; use the periodic law")));
        }
        let (input, epsilon) = self.plan_input(x, hop.to)?;
        Ok(EventDecision {
            node,
            located_scale,
            next_node: hop.to,
            steps: hop.steps,
            input,
            epsilon,
        })
    }

    /// Periodic-phase input for `x ∈ P0`, held for `ĵ` steps.
    pub fn periodic_input(&self, x: &Vector) -> Result<(Vector, f64)> {
        min_eps_hold(
            self.sys,
            &self.maps,
            x,
            self.target(),
            self.law.j_hat,
            1.0,
            self.strict(),
            &self.tol,
        )?
        .ok_or_else(|| Error::Internal("periodic law infeasible inside P0".into()))
    }

    /// Simulates `max_steps` steps: self-triggered events until `x ∈ P0`,
    /// then the periodic law.
    pub fn run(&self, x0: &Vector, max_steps: usize) -> Result<SimulationTrace> {
        self.simulate(x0, max_steps, false)
    }

    /// As [`run`](Self::run) but stops at the first event inside `P0`.
    pub fn run_to_target(&self, x0: &Vector, max_steps: usize) -> Result<SimulationTrace> {
        self.simulate(x0, max_steps, true)
    }

    fn simulate(&self, x0: &Vector, max_steps: usize, stop_at_target: bool) -> Result<SimulationTrace> {
        if x0.len() != self.sys.state_dim() {
            return Err(Error::Dimension(format!(
                "initial state has length {}, expected {}",
                x0.len(),
                self.sys.state_dim()
            )));
        }
        let p0 = &self.target().polytope;
        let g0 = p0.gauge(x0)?;
        if g0 > self.family.a_max + self.tol.mem_tol {
            return Err(Error::OutsideDomain {
                gauge: g0,
                a_max: self.family.a_max,
            });
        }
        let mut x = x0.clone();
        let mut states = vec![x.clone()];
        let mut inputs = Vec::new();
        let mut events = Vec::new();
        let mut entry = None;
        let mut k = 0;
        loop {
            let g = p0.gauge(&x)?;
            if entry.is_none() && g <= 1.0 + self.tol.mem_tol {
                entry = Some(k);
                if stop_at_target {
                    break;
                }
            }
            if k >= max_steps {
                break;
            }
            let (record, u) = if g <= 1.0 + self.tol.mem_tol {
                let (u, eps) = self.periodic_input(&x)?;
                let rec = EventRecord {
                    k,
                    phase: Phase::Periodic,
                    gauge: g,
                    node: None,
                    next_node: None,
                    located_scale: None,
                    steps: self.law.j_hat,
                    epsilon: eps,
                };
                (rec, u)
            } else {
                let d = self.step_decision(&x)?;
                let rec = EventRecord {
                    k,
                    phase: Phase::SelfTriggered,
                    gauge: g,
                    node: Some(d.node),
                    next_node: Some(d.next_node),
                    located_scale: Some(d.located_scale),
                    steps: d.steps,
                    epsilon: d.epsilon,
                };
                (rec, d.input)
            };
            let steps = record.steps.min(max_steps - k);
            for _ in 0..steps {
                x = self.sys.step(&x, &u);
                states.push(x.clone());
                inputs.push(u.clone());
            }
            k += steps;
            events.push(EventRecord { steps, ..record });
        }
        let termination_step = entry.ok_or(Error::NonTermination(max_steps))?;
        Ok(SimulationTrace {
            states,
            inputs,
            events,
            termination_step,
        })
    }
}

/// Step budget `10 · j_max · (number of sets)` within which every run from
/// the domain of attraction must reach `P0`.
pub fn default_step_budget(family: &ScaledFamily) -> usize {
    10 * family.j_max * family.set_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enlargement::tests::{scalar_system, scalar_target};
    use crate::enlargement::{build_family, EnlargeOptions};
    use crate::graph::build_graph;
    use crate::linalg::{matrix_from_rows, vector};
    use crate::HPolytope;

    struct Fixture {
        sys: LinearSystem,
        family: ScaledFamily,
        graph: CompositeGraph,
        law: PeriodicLaw,
    }

    fn fixture(j_max: usize) -> Fixture {
        let tol = Tolerances::default();
        let sys = scalar_system();
        let target = scalar_target(&sys);
        let family = build_family(&sys, &target, j_max, 0.01, EnlargeOptions::default(), &tol).unwrap();
        let graph = build_graph(&family, 1.0, 1.0).unwrap();
        let law = synth_periodic(&sys, &target, j_max, false, &tol).unwrap();
        Fixture {
            sys,
            family,
            graph,
            law,
        }
    }

    impl Fixture {
        fn cl(&self) -> ClosedLoop<'_> {
            ClosedLoop::new(&self.sys, &self.family, &self.graph, &self.law, Tolerances::default()).unwrap()
        }
    }

    #[test]
    fn locate_examples() {
        let f = fixture(1);
        let cl = f.cl();
        let (id, a) = cl.locate(&vector(&[0.0])).unwrap();
        assert_eq!((id, a), (NodeId::Set { j: 1, l: 0 }, 1.0));
        let (id, a) = cl.locate(&vector(&[0.5])).unwrap();
        assert_eq!(id, NodeId::Set { j: 1, l: 2 });
        assert!((a - 7.0).abs() < 1e-9);
        assert!(matches!(cl.locate(&vector(&[1.05])), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn locate_prefers_cheaper_ties() {
        let f = fixture(3);
        let cl = f.cl();
        let (id, _) = cl.locate(&vector(&[0.05])).unwrap();
        assert_eq!(id, NodeId::Set { j: 1, l: 0 });
    }

    #[test]
    fn plan_input_hand_lp() {
        let f = fixture(1);
        let cl = f.cl();
        let (u, eps) = cl.plan_input(&vector(&[0.35]), NodeId::Set { j: 1, l: 0 }).unwrap();
        assert!((u[0] + 0.3).abs() < 1e-9);
        assert!((eps - 0.5).abs() < 1e-9);
        let (u, eps) = cl.plan_input(&vector(&[0.0]), NodeId::Set { j: 1, l: 2 }).unwrap();
        assert!(eps.abs() < 1e-12);
        assert!(u[0].abs() < 1e-12);
    }

    #[test]
    fn plan_input_rejects_uncertified_hold() {
        let f = fixture(1);
        let cl = f.cl();
        let err = cl.plan_input(&vector(&[0.95]), NodeId::Set { j: 1, l: 0 }).unwrap_err();
        assert!(matches!(err, Error::EdgeCertificate(_)));
    }

    #[test]
    fn step_decision_follows_chain() {
        let f = fixture(1);
        let cl = f.cl();
        let d = cl.step_decision(&vector(&[0.95])).unwrap();
        assert_eq!(d.node, NodeId::Set { j: 1, l: 3 });
        assert_eq!(d.next_node, NodeId::Set { j: 1, l: 2 });
        assert_eq!(d.steps, 1);
        assert!(d.epsilon < 1.0);
        assert!(f.sys.input_set.contains(&d.input, 1e-9).unwrap());
        let end = f.sys.step(&vector(&[0.95]), &d.input);
        assert!(f.family.target.polytope.gauge(&end).unwrap() <= d.epsilon * 7.0 + 1e-7);
    }

    #[test]
    fn periodic_law_scalar() {
        let f = fixture(3);
        assert!(f.law.j_hat >= 2);
        assert!(f.law.epsilon_star < 1.0);
        let tol = Tolerances::default();
        let maps = f.sys.hold_maps_upto(2);
        let (eps, _) = periodic_vertex_lp(&f.sys, &f.family.target, &maps, 2, false, &tol)
            .unwrap()
            .unwrap();
        assert!(eps <= 0.1 + 1e-9);
    }

    #[test]
    fn periodic_law_autonomous_decay() {
        let tol = Tolerances::default();
        let x = HPolytope::symmetric_box(&[1.0, 1.0]).unwrap();
        let u = HPolytope::symmetric_box(&[1.0]).unwrap();
        let sys = LinearSystem::new(matrix_from_rows(&[&[0.5, 0.0], &[0.0, 0.5]]), Matrix::zeros(2, 1), x, u).unwrap();
        let p0 = HPolytope::symmetric_box(&[0.5, 0.5]).unwrap();
        let vertices = p0.enumerate_vertices(&tol).unwrap().into_inner();
        let target = TargetSet {
            polytope: p0,
            witnesses: vec![vector(&[0.0]); vertices.len()],
            vertices,
            lambda: 0.5,
            iterations: 1,
        };
        let law = synth_periodic(&sys, &target, 6, false, &tol).unwrap();
        assert_eq!(law.j_hat, 6);
        assert!((law.epsilon_star - 0.5f64.powi(6)).abs() < 1e-9);
        assert!(law.vertex_inputs.iter().all(|u| u[0].abs() < 1e-12));
    }

    #[test]
    fn periodic_input_bounds() {
        let f = fixture(3);
        let cl = f.cl();
        let (u, eps) = cl.periodic_input(&vector(&[0.0])).unwrap();
        assert!(eps.abs() < 1e-12 && u[0].abs() < 1e-12);
        for x in [-0.1, -0.07, 0.02, 0.1] {
            let (_, eps) = cl.periodic_input(&vector(&[x])).unwrap();
            assert!(eps <= f.law.epsilon_star + 1e-9);
        }
    }

    #[test]
    fn closed_loop_from_edge_of_domain() {
        let f = fixture(1);
        let cl = f.cl();
        let trace = cl.run(&vector(&[0.95]), 40).unwrap();
        let scales = trace.located_scales();
        assert!(!scales.is_empty());
        assert!(scales.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(trace.states.len(), 41);
        assert_eq!(trace.inputs.len(), 40);
        for (k, u) in trace.inputs.iter().enumerate() {
            let next = f.sys.step(&trace.states[k], u);
            assert_eq!(next, trace.states[k + 1]);
        }
        let entry = trace.termination_step;
        assert!(f.family.target.polytope.gauge(&trace.states[entry]).unwrap() <= 1.0 + 1e-7);
        assert!(trace
            .events
            .iter()
            .all(|e| (e.phase == Phase::Periodic) == (e.k >= entry)));
    }

    #[test]
    fn closed_loop_inside_target_is_periodic() {
        let f = fixture(2);
        let cl = f.cl();
        let trace = cl.run(&vector(&[0.05]), 12).unwrap();
        assert_eq!(trace.termination_step, 0);
        assert!(trace.events.iter().all(|e| e.phase == Phase::Periodic));
        assert_eq!(trace.mean_inter_event(), None);
        let to_target = cl.run_to_target(&vector(&[0.05]), 12).unwrap();
        assert!(to_target.events.is_empty());
        assert_eq!(to_target.states.len(), 1);
    }

    #[test]
    fn closed_loop_errors() {
        let f = fixture(1);
        let cl = f.cl();
        assert!(matches!(cl.run(&vector(&[2.0]), 10), Err(Error::OutsideDomain { .. })));
        assert!(matches!(cl.run(&vector(&[0.95]), 1), Err(Error::NonTermination(1))));
        assert!(matches!(cl.run(&vector(&[0.0, 0.0]), 1), Err(Error::Dimension(_))));
    }
}
