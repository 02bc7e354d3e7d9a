use std::collections::BTreeSet;

use proptest::prelude::*;
use stc_core::contractive::{qmap, verify_contractive};
use stc_core::graph::{shortest_path, CompositeGraph, Edge, EdgeKind, Node, NodeId};
use stc_core::linalg::{matrix_from_rows, power_sum, vector};
use stc_core::lp::{lp_solve, LpBuilder, LpStatus};
use stc_core::polytope::convex_weights;
use stc_core::{HPolytope, LinearSystem, Matrix, Tolerances, Vector};

fn tol() -> Tolerances {
    Tolerances::default()
}

/// A C-set in the plane: `k` halfspaces whose outward normals leave no
/// angular gap of `pi` or more, so the result is bounded.
fn planar_polytope() -> impl Strategy<Value = HPolytope> {
    (4usize..9).prop_flat_map(|k| {
        (
            prop::collection::vec(0.0f64..1.0, k),
            prop::collection::vec(0.2f64..2.0, k),
        )
            .prop_map(move |(jitter, offsets)| {
                let step = std::f64::consts::TAU / k as f64;
                let h = Matrix::from_fn(k, 2, |i, c| {
                    let t = step * (i as f64 + 0.4 * jitter[i]);
                    if c == 0 {
                        t.cos()
                    } else {
                        t.sin()
                    }
                });
                HPolytope::new(h, Vector::from_vec(offsets)).unwrap()
            })
    })
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn point2(r: f64) -> impl Strategy<Value = Vector> {
    (-r..r, -r..r).prop_map(|(a, b)| vector(&[a, b]))
}

proptest! {
    #![proptest_config(cases(200))]

    #[test]
    fn gauge_is_positively_homogeneous(p in planar_polytope(), x in point2(3.0), t in 0.0f64..50.0) {
        let g = p.gauge(&x).unwrap();
        let gt = p.gauge(&(&x * t)).unwrap();
        prop_assert!((gt - t * g).abs() <= 1e-9 * (1.0 + t * g));
    }

    #[test]
    fn gauge_and_membership_agree(p in planar_polytope(), x in point2(3.0)) {
        let g = p.gauge(&x).unwrap();
        prop_assume!((g - 1.0).abs() > 1e-9);
        prop_assert_eq!(p.contains(&x, 0.0).unwrap(), g <= 1.0);
    }

    #[test]
    fn scaling_composes_exactly(p in planar_polytope(), a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let twice = p.scale(a).unwrap().scale(b).unwrap();
        let once = p.scale(a * b).unwrap();
        prop_assert_eq!(twice.offsets(), once.offsets());
    }

    #[test]
    fn vertices_match_membership(p in planar_polytope(), samples in prop::collection::vec(point2(3.0), 40)) {
        let t = tol();
        let verts = p.enumerate_vertices(&t).unwrap().into_inner();
        prop_assert!(verts.len() >= 3);
        for v in &verts {
            prop_assert!(p.contains(v, 1e-7).unwrap());
        }
        for x in &samples {
            let g = p.gauge(x).unwrap();
            prop_assume!((g - 1.0).abs() > 1e-6);
            let in_hull = convex_weights(&verts, x, 0.0, &t).unwrap().is_some();
            prop_assert_eq!(in_hull, g < 1.0, "x = {:?}, gauge {}", x.as_slice(), g);
        }
    }

    #[test]
    fn power_sum_recurrence(
        entries in prop::collection::vec(-1.5f64..1.5, 4),
        b in prop::collection::vec(-1.0f64..1.0, 2),
        j in 1usize..12,
    ) {
        let a = Matrix::from_row_slice(2, 2, &entries);
        let b = Matrix::from_row_slice(2, 1, &b);
        let (aj, sj) = power_sum(&a, &b, j).unwrap();
        let (aj1, sj1) = power_sum(&a, &b, j + 1).unwrap();
        let scale = 1.0 + aj.amax() + sj.amax();
        prop_assert!((&aj1 - &a * &aj).amax() <= 1e-9 * scale * (1.0 + a.amax()));
        prop_assert!((&sj1 - (&sj + &aj * &b)).amax() <= 1e-9 * scale * (1.0 + b.amax()));
    }

    #[test]
    fn lp_matches_vertex_scan(p in planar_polytope(), c in point2(1.0)) {
        // The optimum of a bounded LP is attained at a vertex.
        let t = tol();
        let verts = p.enumerate_vertices(&t).unwrap().into_inner();
        let best = verts.iter().map(|v| c.dot(v)).fold(f64::INFINITY, f64::min);
        let mut lp = LpBuilder::new(2);
        lp.set_objective(0, c[0]).set_objective(1, c[1]);
        for i in 0..p.num_constraints() {
            lp.le(&[p.matrix()[(i, 0)], p.matrix()[(i, 1)]], p.offsets()[i]);
        }
        let out = lp_solve(&lp.build(), t.feas_tol).unwrap();
        prop_assert_eq!(out.status, LpStatus::Optimal);
        prop_assert!((out.objective - best).abs() <= 1e-7 * (1.0 + best.abs()));
    }

    #[test]
    fn projection_matches_input_grid(
        a in prop::collection::vec(-1.2f64..1.2, 4),
        b in prop::collection::vec(-1.0f64..1.0, 2),
        lambda in 0.3f64..0.95,
        xs in prop::collection::vec(point2(1.5), 25),
    ) {
        let t = tol();
        let a = Matrix::from_row_slice(2, 2, &a);
        let b = Matrix::from_row_slice(2, 1, &b);
        let sys = LinearSystem::new(
            a.clone(),
            b.clone(),
            HPolytope::symmetric_box(&[1.0, 1.0]).unwrap(),
            HPolytope::symmetric_box(&[0.5]).unwrap(),
        ).unwrap();
        let d = HPolytope::symmetric_box(&[0.6, 0.4]).unwrap();
        let q = match qmap(&sys, &d, lambda, &t) {
            Ok(q) => q,
            Err(stc_core::Error::Empty) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let target = d.scale(lambda).unwrap();
        const GRID: usize = 2001;
        for x in &xs {
            let margin = (q.matrix() * x - q.offsets()).max();
            prop_assume!(margin.abs() > 1e-3);
            let inside = margin < 0.0;
            let in_x = x.amax() <= 1.0;
            let mut grid_ok = false;
            for k in 0..GRID {
                let u = -0.5 + k as f64 / (GRID - 1) as f64;
                let next = &a * x + &b * u;
                let viol = (target.matrix() * &next - target.offsets()).max();
                if in_x && viol <= 1e-3 {
                    grid_ok = true;
                    break;
                }
            }
            if inside {
                prop_assert!(grid_ok, "x = {:?} in projection but no grid input works", x.as_slice());
            } else {
                // Outside by more than the margin: no input lands exactly.
                let exact = (0..GRID).any(|k| {
                    let u = -0.5 + k as f64 / (GRID - 1) as f64;
                    in_x && target.contains(&(&a * x + &b * u), 0.0).unwrap()
                });
                prop_assert!(!exact, "x = {:?} outside projection but a grid input works", x.as_slice());
            }
        }
    }
}

/// Exhaustive minimum cost over simple paths to the terminal.
fn brute_force(g: &CompositeGraph, from: NodeId, seen: &mut BTreeSet<NodeId>) -> Option<f64> {
    if from == NodeId::Terminal {
        return Some(0.0);
    }
    seen.insert(from);
    let mut best: Option<f64> = None;
    for e in g.edges().iter().filter(|e| e.from == from) {
        if seen.contains(&e.to) {
            continue;
        }
        if let Some(rest) = brute_force(g, e.to, seen) {
            let c = e.cost + rest;
            best = Some(best.map_or(c, |b: f64| b.min(c)));
        }
    }
    seen.remove(&from);
    best
}

fn random_graph() -> impl Strategy<Value = CompositeGraph> {
    (2usize..8).prop_flat_map(|n| {
        prop::collection::vec((0..n + 1, 0..n + 1, 0u8..6), 0..(n * n)).prop_map(move |raw| {
            let ids: Vec<NodeId> = (0..n)
                .map(|i| NodeId::Set { j: 1 + i % 3, l: i / 3 })
                .chain(std::iter::once(NodeId::Terminal))
                .collect();
            let nodes = ids
                .iter()
                .map(|&id| Node {
                    id,
                    scale: (id != NodeId::Terminal).then_some(1.0),
                })
                .collect();
            let mut seen = BTreeSet::new();
            let edges = raw
                .into_iter()
                .filter(|&(f, t, _)| f != t && f != n && seen.insert((f, t)))
                .map(|(f, t, c)| Edge {
                    from: ids[f],
                    to: ids[t],
                    cost: f64::from(c) * 0.5,
                    steps: 1,
                    kind: EdgeKind::Cross,
                })
                .collect();
            CompositeGraph::from_parts(nodes, edges, 1.0, 1.0).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn dijkstra_matches_exhaustive_search(g in random_graph()) {
        for node in g.nodes() {
            let want = brute_force(&g, node.id, &mut BTreeSet::new());
            match (shortest_path(&g, node.id), want) {
                (Ok(path), Some(cost)) => {
                    prop_assert!((path.total_cost - cost).abs() < 1e-12);
                    let walked: f64 = path
                        .nodes
                        .windows(2)
                        .map(|w| g.edges().iter().find(|e| e.from == w[0] && e.to == w[1]).unwrap().cost)
                        .sum();
                    prop_assert!((walked - cost).abs() < 1e-12);
                    prop_assert_eq!(*path.nodes.last().unwrap(), NodeId::Terminal);
                }
                (Err(stc_core::Error::NoPath(_)), None) => {}
                (got, want) => prop_assert!(false, "{:?} vs {:?}", got, want),
            }
        }
    }
}

#[test]
fn scaled_contractive_set_stays_contractive() {
    // Witnesses of magnitude 0.05 against |u| <= 1 leave scaling room.
    let sys = LinearSystem::new(
        matrix_from_rows(&[&[1.1, 0.0], &[0.0, 0.9]]),
        matrix_from_rows(&[&[1.0], &[0.0]]),
        HPolytope::symmetric_box(&[10.0, 10.0]).unwrap(),
        HPolytope::symmetric_box(&[1.0]).unwrap(),
    )
    .unwrap();
    let p = HPolytope::symmetric_box(&[0.1, 0.1]).unwrap();
    let check = verify_contractive(&sys, &p, 0.95, &tol()).unwrap();
    assert!(check.passed);
    for gamma in [1.5, 3.0, 10.0, 19.0] {
        let scaled = p.scale(gamma).unwrap();
        assert!(verify_contractive(&sys, &scaled, 0.95, &tol()).unwrap().passed);
    }
}
