//! Built-in example graphs used by the test suite and bundled with the CLI.

use crate::graph::MetricGraph;
use crate::rational::Rational;

fn build(vertices: &[(&str, u32)], edges: &[(&str, &str, &str, &str)]) -> MetricGraph {
    MetricGraph::new(
        vertices.iter().map(|(id, w)| (id.to_string(), *w)).collect(),
        edges
            .iter()
            .map(|(id, a, b, len)| {
                (
                    id.to_string(),
                    a.to_string(),
                    b.to_string(),
                    len.parse::<Rational>().unwrap(),
                )
            })
            .collect(),
    )
    .expect("corpus graphs are well formed")
}

/// Two vertices joined by three unit edges; genus 2.
pub fn theta() -> MetricGraph {
    build(
        &[("u", 0), ("v", 0)],
        &[
            ("e1", "u", "v", "1"),
            ("e2", "u", "v", "1"),
            ("e3", "u", "v", "1"),
        ],
    )
}

/// Two vertices joined by g+1 unit edges; genus g.
pub fn banana(g: u32) -> MetricGraph {
    let ids: Vec<String> = (1..=g + 1).map(|k| format!("e{k}")).collect();
    MetricGraph::new(
        vec![("v1".into(), 0), ("v2".into(), 0)],
        ids.iter()
            .map(|id| (id.clone(), "v1".into(), "v2".into(), Rational::integer(1)))
            .collect(),
    )
    .expect("banana graphs are well formed")
}

/// Three petals hanging off a center by bridges; genus 3. Each petal is a
/// two-arc circle v(2k-1) -- v(2k), reached from v0 by a unit bridge.
pub fn three_petal() -> MetricGraph {
    build(
        &[
            ("v0", 0),
            ("v1", 0),
            ("v2", 0),
            ("v3", 0),
            ("v4", 0),
            ("v5", 0),
            ("v6", 0),
        ],
        &[
            ("e1", "v0", "v1", "1"),
            ("e2", "v0", "v3", "1"),
            ("e3", "v0", "v5", "1"),
            ("e4", "v1", "v2", "1"),
            ("e5", "v1", "v2", "1"),
            ("e6", "v3", "v4", "1"),
            ("e7", "v3", "v4", "1"),
            ("e8", "v5", "v6", "1"),
            ("e9", "v5", "v6", "1"),
        ],
    )
}

/// Hyperelliptic genus-4 graph: a top row w1 -- v1 -- w3 and a bottom row
/// v2 -- z2 -- z3 of unit edges, tied together by five length-2 paths
/// (each subdivided by a midpoint so all edges are unit). Swapping the rows
/// is the hyperelliptic involution; the five midpoints u1, u2, w2, u3, u4
/// are its fixed points.
pub fn ladder4() -> MetricGraph {
    build(
        &[
            ("v1", 0),
            ("v2", 0),
            ("w1", 0),
            ("w2", 0),
            ("w3", 0),
            ("u1", 0),
            ("u2", 0),
            ("u3", 0),
            ("u4", 0),
            ("z2", 0),
            ("z3", 0),
        ],
        &[
            ("t1", "w1", "v1", "1"),
            ("t2", "v1", "w3", "1"),
            ("b1", "v2", "z2", "1"),
            ("b2", "z2", "z3", "1"),
            ("r1", "v2", "u2", "1"),
            ("r2", "u2", "w1", "1"),
            ("r3", "z2", "w2", "1"),
            ("r4", "w2", "v1", "1"),
            ("r5", "z3", "u3", "1"),
            ("r6", "u3", "w3", "1"),
            ("a1", "u1", "w1", "1"),
            ("a2", "u1", "v2", "1"),
            ("a3", "u4", "w3", "1"),
            ("a4", "u4", "z3", "1"),
        ],
    )
}

/// Complete graph on four vertices, unit lengths; genus 3, not hyperelliptic.
pub fn k4() -> MetricGraph {
    build(
        &[("a", 0), ("b", 0), ("c", 0), ("d", 0)],
        &[
            ("e1", "a", "b", "1"),
            ("e2", "a", "c", "1"),
            ("e3", "a", "d", "1"),
            ("e4", "b", "c", "1"),
            ("e5", "b", "d", "1"),
            ("e6", "c", "d", "1"),
        ],
    )
}

/// Path on three vertices; a tree of genus 0.
pub fn path3() -> MetricGraph {
    build(
        &[("p1", 0), ("p2", 0), ("p3", 0)],
        &[("e1", "p1", "p2", "1"), ("e2", "p2", "p3", "1")],
    )
}

/// Triangle; genus 1.
pub fn cycle3() -> MetricGraph {
    build(
        &[("c1", 0), ("c2", 0), ("c3", 0)],
        &[
            ("e1", "c1", "c2", "1"),
            ("e2", "c2", "c3", "1"),
            ("e3", "c3", "c1", "1"),
        ],
    )
}

/// A single vertex of the given weight and no edges.
pub fn weighted_vertex(weight: u32) -> MetricGraph {
    MetricGraph::new(vec![("v".into(), weight)], vec![]).expect("single vertex is well formed")
}

/// Two unit loops joined by a unit bridge; genus 2.
pub fn dumbbell() -> MetricGraph {
    build(
        &[("u", 0), ("v", 0)],
        &[
            ("l1", "u", "u", "1"),
            ("l2", "v", "v", "1"),
            ("b", "u", "v", "1"),
        ],
    )
}

/// Every named fixture, for sweep-style tests and the bundled corpus files.
pub fn all() -> Vec<(&'static str, MetricGraph)> {
    vec![
        ("theta", theta()),
        ("banana2", banana(2)),
        ("banana3", banana(3)),
        ("banana4", banana(4)),
        ("banana5", banana(5)),
        ("three-petal", three_petal()),
        ("ladder4", ladder4()),
        ("k4", k4()),
        ("path3", path3()),
        ("cycle3", cycle3()),
        ("weighted2", weighted_vertex(2)),
        ("dumbbell", dumbbell()),
    ]
}
