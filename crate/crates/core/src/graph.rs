//! Symbolic transition graph over the scaled-set family, with edge costs
//! trading convergence rate against hold length, and shortest paths to the
//! terminal node.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::enlargement::ScaledFamily;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NodeId {
    /// The set `a_{j,ℓ} P0`.
    Set {
        j: usize,
        l: usize,
    },
    Terminal,
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Set { j, l } => write!(f, "s_{{{j},{l}}}"),
            NodeId::Terminal => write!(f, "s_f"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EdgeKind {
    Chain,
    Cross,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// `a_{j,ℓ}`; `None` for the terminal node.
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
    /// Hold length of the transition (0 for edges into the terminal node).
    pub steps: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphData {
    p: f64,
    q: f64,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphData", into = "GraphData")]
pub struct CompositeGraph {
    pub p: f64,
    pub q: f64,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
    incoming: Vec<Vec<usize>>,
}

impl TryFrom<GraphData> for CompositeGraph {
    type Error = Error;

    fn try_from(d: GraphData) -> Result<Self> {
        CompositeGraph::from_parts(d.nodes, d.edges, d.p, d.q)
    }
}

impl From<CompositeGraph> for GraphData {
    fn from(g: CompositeGraph) -> Self {
        GraphData {
            p: g.p,
            q: g.q,
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl CompositeGraph {
    /// Assembles a graph from explicit parts; every edge endpoint must be a
    /// listed node and every cost nonnegative.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>, p: f64, q: f64) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::Argument(format!("duplicate node {}", n.id)));
            }
        }
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (e_idx, e) in edges.iter().enumerate() {
            let (Some(_), Some(&to)) = (index.get(&e.from), index.get(&e.to)) else {
                return Err(Error::Argument(format!(
                    "edge {} -> {} has unknown endpoint",
                    e.from, e.to
                )));
            };
            if !(e.cost >= 0.0) {
                return Err(Error::Argument(format!(
                    "edge {} -> {} has cost {}",
                    e.from, e.to, e.cost
                )));
            }
            incoming[to].push(e_idx);
        }
        Ok(Self {
            p,
            q,
            nodes,
            edges,
            index,
            incoming,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn scale_of(&self, id: NodeId) -> Option<f64> {
        self.node(id).and_then(|n| n.scale)
    }

    /// Set nodes only (the terminal node excluded).
    pub fn set_node_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.id != NodeId::Terminal).count()
    }

    pub fn contains_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }

    /// Distances to the terminal node and next hops for every node.
    pub fn shortest_paths(&self) -> ShortestPaths {
        ShortestPaths::compute(self)
    }
}

/// `p j' / (a_from − a_to) + q / j'`.
pub fn edge_cost(p: f64, q: f64, steps: usize, a_from: f64, a_to: f64) -> Result<f64> {
    if steps == 0 {
        return Err(Error::Argument("hold length must be >= 1".into()));
    }
    if !(a_from > a_to) {
        return Err(Error::Argument(format!(
            "edge must shrink the set: a_from = {a_from}, a_to = {a_to}"
        )));
    }
    let j = steps as f64;
    Ok(p * j / (a_from - a_to) + q / j)
}

/// Builds the composite graph: within-chain edges `(j,ℓ) → (j,ℓ−1)`,
/// zero-cost edges `(j,0) → s_f`, and cross edges `(j,ℓ) → (j',ℓ')` for
/// `j' ≠ j` whenever `a_{j',ℓ'} < a_{j,ℓ} <= a_{j',ℓ'+1}`.
pub fn build_graph(family: &ScaledFamily, p: f64, q: f64) -> Result<CompositeGraph> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Argument(format!(
            "weights must be positive, got p = {p}, q = {q}"
        )));
    }
    let mut nodes: Vec<Node> = family
        .indices()
        .map(|(j, l)| Node {
            id: NodeId::Set { j, l },
            scale: family.scale(j, l),
        })
        .collect();
    nodes.push(Node {
        id: NodeId::Terminal,
        scale: None,
    });

    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut push = |edge: Edge| {
        if seen.insert((edge.from, edge.to)) {
            edges.push(edge);
        }
    };
    for (jm1, chain) in family.scales.iter().enumerate() {
        let j = jm1 + 1;
        push(Edge {
            from: NodeId::Set { j, l: 0 },
            to: NodeId::Terminal,
            cost: 0.0,
            steps: 0,
            kind: EdgeKind::Terminal,
        });
        for l in 1..chain.len() {
            push(Edge {
                from: NodeId::Set { j, l },
                to: NodeId::Set { j, l: l - 1 },
                cost: edge_cost(p, q, j, chain[l], chain[l - 1])?,
                steps: j,
                kind: EdgeKind::Chain,
            });
        }
    }
    for (jm1, chain) in family.scales.iter().enumerate() {
        let j = jm1 + 1;
        for (l, &a) in chain.iter().enumerate() {
            for (jpm1, other) in family.scales.iter().enumerate() {
                if jpm1 == jm1 {
                    continue;
                }
                let jp = jpm1 + 1;
                if let Some(lp) = (0..other.len().saturating_sub(1)).find(|&lp| other[lp] < a && a <= other[lp + 1]) {
                    push(Edge {
                        from: NodeId::Set { j, l },
                        to: NodeId::Set { j: jp, l: lp },
                        cost: edge_cost(p, q, jp, a, other[lp])?,
                        steps: jp,
                        kind: EdgeKind::Cross,
                    });
                }
            }
        }
    }
    CompositeGraph::from_parts(nodes, edges, p, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub steps: usize,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    /// From the start node to `s_f` inclusive.
    pub nodes: Vec<NodeId>,
    pub total_cost: f64,
    /// `None` only when the start is the terminal node.
    pub first_hop: Option<Hop>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapKey(f64);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-target shortest-path tree toward `s_f`.
///
/// Among equal-cost continuations the lexicographically smallest next node
/// `(j, ℓ)` is kept, so paths are reproducible.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    dist: Vec<f64>,
    // edge index of the next hop
    next: Vec<Option<usize>>,
}

impl ShortestPaths {
    fn compute(g: &CompositeGraph) -> Self {
        let n = g.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut next: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let Some(&t) = g.index.get(&NodeId::Terminal) else {
            return Self { dist, next };
        };
        dist[t] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((HeapKey(0.0), g.nodes[t].id, t)));
        while let Some(Reverse((HeapKey(d), _, v))) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &e_idx in &g.incoming[v] {
                let e = &g.edges[e_idx];
                let u = g.index[&e.from];
                if done[u] {
                    continue;
                }
                let cand = d + e.cost;
                let better = match next[u] {
                    None => true,
                    Some(cur) => cand < dist[u] || (cand == dist[u] && e.to < g.edges[cur].to),
                };
                if better {
                    dist[u] = cand;
                    next[u] = Some(e_idx);
                    heap.push(Reverse((HeapKey(cand), e.from, u)));
                }
            }
        }
        Self { dist, next }
    }

    pub fn cost_to_go(&self, g: &CompositeGraph, id: NodeId) -> Option<f64> {
        let d = self.dist[*g.index.get(&id)?];
        d.is_finite().then_some(d)
    }

    pub fn path(&self, g: &CompositeGraph, start: NodeId) -> Result<PathResult> {
        let &s = g
            .index
            .get(&start)
            .ok_or_else(|| Error::Argument(format!("{start} is not a node of the graph")))?;
        if !self.dist[s].is_finite() {
            return Err(Error::NoPath(start.to_string()));
        }
        let mut nodes = vec![start];
        let mut first_hop = None;
        let mut cur = s;
        while let Some(e_idx) = self.next[cur] {
            let e = &g.edges[e_idx];
            if first_hop.is_none() {
                first_hop = Some(Hop {
                    steps: e.steps,
                    to: e.to,
                });
            }
            nodes.push(e.to);
            cur = g.index[&e.to];
        }
        Ok(PathResult {
            nodes,
            total_cost: self.dist[s],
            first_hop,
        })
    }

    /// True when every node has a path to `s_f`.
    pub fn all_reach_terminal(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }
}

/// Minimum-cost path from `start` to `s_f`.
pub fn shortest_path(g: &CompositeGraph, start: NodeId) -> Result<PathResult> {
    g.shortest_paths().path(g, start)
}

fn dot_name(id: NodeId) -> String {
    match id {
        NodeId::Set { j, l } => format!("s_{j}_{l}"),
        NodeId::Terminal => "s_f".to_string(),
    }
}

/// Graphviz rendering of the graph.
pub fn export_dot(g: &CompositeGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph composite {\n  rankdir=LR;\n");
    for n in &g.nodes {
        match n.scale {
            Some(a) => writeln!(out, "  {} [label=\"{}(a={})\"];", dot_name(n.id), n.id, a),
            None => writeln!(out, "  {} [label=\"s_f\", shape=doublecircle];", dot_name(n.id)),
        }
        .expect("writing to a String");
    }
    for e in &g.edges {
        writeln!(
            out,
            "  {} -> {} [label=\"cost={}, j={}\"];",
            dot_name(e.from),
            dot_name(e.to),
            e.cost,
            e.steps
        )
        .expect("writing to a String");
    }
    out.push_str("}\n");
    out
}
