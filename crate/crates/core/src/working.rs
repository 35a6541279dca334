//! The working graph: a uniform unit-length subdivision of a metric graph.
//!
//! Given denominators for the points that must be addressable, the
//! refinement N is twice the lcm of those denominators and of all edge
//! length denominators. Every edge of length l is split into l*N unit
//! segments, so the working graph is loopless (every edge gets at least two
//! segments) and the midpoint of every edge is a working vertex (the segment
//! count l*N is always even). Subdivision vertices have valence 2 and weight
//! 0; the genus is unchanged.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Point};
use crate::rational::Rational;

/// A vertex of the working graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// Index into the base graph's vertex list.
    Base(usize),
    /// Interior grid point: (base edge index, step from tail, total steps).
    Interior(usize, i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkEdge {
    pub a: usize,
    pub b: usize,
    /// Base edge this unit segment subdivides.
    pub base_edge: usize,
    /// Segment index along the base edge, counted from the tail.
    pub segment: i64,
}

#[derive(Debug, Clone)]
pub struct WorkingGraph {
    base: MetricGraph,
    refinement: i64,
    nodes: Vec<Node>,
    edges: Vec<WorkEdge>,
    adj: Vec<Vec<(usize, usize)>>,
    base_vertex_node: Vec<usize>,
    grid: BTreeMap<(usize, i64), usize>,
}

fn lcm_i64(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(b)
        .ok_or_else(|| Error::resource_cap("refinement overflow computing lcm of denominators"))
}

impl WorkingGraph {
    /// Builds the working graph whose grid is fine enough for every listed
    /// denominator (and always for the edge lengths themselves).
    pub fn new(base: &MetricGraph, denominators: &[i64]) -> Result<WorkingGraph> {
        let mut l: i64 = 1;
        for e in base.edges() {
            l = lcm_i64(l, e.length.denom())?;
        }
        for &d in denominators {
            if d <= 0 {
                return Err(Error::invalid_input(format!("denominator {d} must be positive")));
            }
            l = lcm_i64(l, d)?;
        }
        let n = l
            .checked_mul(2)
            .ok_or_else(|| Error::resource_cap("refinement overflow"))?;
        Self::with_refinement(base, n)
    }

    /// Builds the working graph with an explicit even refinement N. Every
    /// edge length times N must be an integer.
    pub fn with_refinement(base: &MetricGraph, refinement: i64) -> Result<WorkingGraph> {
        if refinement <= 0 || refinement % 2 != 0 {
            return Err(Error::invalid_input(format!(
                "refinement must be a positive even integer, got {refinement}"
            )));
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut base_vertex_node = Vec::with_capacity(base.vertices().len());
        for i in 0..base.vertices().len() {
            base_vertex_node.push(nodes.len());
            nodes.push(Node::Base(i));
        }
        let mut grid = BTreeMap::new();
        let mut edges = Vec::new();
        let mut segment_counts = Vec::with_capacity(base.edges().len());
        for e in base.edges() {
            let steps = e.length.scaled_integer(refinement).ok_or_else(|| {
                Error::invalid_input(format!(
                    "edge `{}` of length {} is not divisible by the 1/{refinement} grid",
                    e.id, e.length
                ))
            })?;
            segment_counts.push(steps);
        }
        let total_segments: i64 = segment_counts.iter().sum();
        if total_segments > 2_000_000 {
            return Err(Error::resource_cap(format!(
                "working graph would have {total_segments} segments"
            )));
        }
        for (ei, e) in base.edges().iter().enumerate() {
            let steps = segment_counts[ei];
            let mut prev = base_vertex_node[e.tail];
            for s in 1..steps {
                let node = nodes.len();
                nodes.push(Node::Interior(ei, s, steps));
                grid.insert((ei, s), node);
                edges.push(WorkEdge {
                    a: prev,
                    b: node,
                    base_edge: ei,
                    segment: s - 1,
                });
                prev = node;
            }
            edges.push(WorkEdge {
                a: prev,
                b: base_vertex_node[e.head],
                base_edge: ei,
                segment: steps - 1,
            });
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        Ok(WorkingGraph {
            base: base.clone(),
            refinement,
            nodes,
            edges,
            adj,
            base_vertex_node,
            grid,
        })
    }

    pub fn base(&self) -> &MetricGraph {
        &self.base
    }

    pub fn refinement(&self) -> i64 {
        self.refinement
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[WorkEdge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adj[node]
    }

    pub fn valence(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn base_vertex_node(&self, vertex: usize) -> usize {
        self.base_vertex_node[vertex]
    }

    /// Number of parallel working edges between two nodes.
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.adj[a].iter().filter(|&&(w, _)| w == b).count()
    }

    /// Maps a point of the base graph onto its working-graph node. Errors if
    /// the point does not lie on the grid.
    pub fn node_of_point(&self, p: &Point) -> Result<usize> {
        self.base.validate_point(p)?;
        match p {
            Point::Vertex(v) => {
                let vi = self.base.vertex_index(v).expect("validated");
                Ok(self.base_vertex_node[vi])
            }
            Point::OnEdge { edge, offset } => {
                let ei = self.base.edge_index(edge).expect("validated");
                let step = offset.scaled_integer(self.refinement).ok_or_else(|| {
                    Error::precondition(format!(
                        "point {p} does not lie on the 1/{} grid",
                        self.refinement
                    ))
                })?;
                self.grid.get(&(ei, step)).copied().ok_or_else(|| {
                    Error::internal(format!("grid point ({edge}, {step}) missing"))
                })
            }
        }
    }

    /// Maps a working-graph node back to a point of the base graph.
    pub fn point_of_node(&self, node: usize) -> Point {
        match &self.nodes[node] {
            Node::Base(v) => Point::Vertex(self.base.vertex_id(*v).to_string()),
            Node::Interior(ei, s, _steps) => {
                let e = &self.base.edges()[*ei];
                let offset = Rational::new(*s, self.refinement).expect("refinement positive");
                Point::OnEdge {
                    edge: e.id.clone(),
                    offset,
                }
            }
        }
    }

    /// Stable display name of a node: the vertex id, or `edge@offset`.
    pub fn node_name(&self, node: usize) -> String {
        self.point_of_node(node).to_string()
    }

    /// Nodes sorted by name; the deterministic iteration order for output.
    pub fn nodes_by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            self.point_of_node(a)
                .cmp(&self.point_of_node(b))
        });
        order
    }

    /// Genus of the working graph (equals the base graph's genus).
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.nodes.len() as i64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn theta_working_graph() {
        let wg = WorkingGraph::new(&corpus::theta(), &[1]).unwrap();
        assert_eq!(wg.refinement(), 2);
        assert_eq!(wg.node_count(), 5);
        assert_eq!(wg.edge_count(), 6);
        assert_eq!(wg.genus(), 2);
    }

    #[test]
    fn three_petal_working_graph() {
        let wg = WorkingGraph::new(&corpus::three_petal(), &[1]).unwrap();
        assert_eq!(wg.refinement(), 2);
        assert_eq!(wg.node_count(), 16);
        assert_eq!(wg.genus(), 3);
    }

    #[test]
    fn loop_subdivision_is_loopless() {
        let g = MetricGraph::new(
            vec![("v".into(), 0), ("u".into(), 0)],
            vec![
                ("e".into(), "v".into(), "v".into(), r("1")),
                ("f".into(), "u".into(), "v".into(), r("1")),
            ],
        )
        .unwrap();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        assert!(wg.edges().iter().all(|e| e.a != e.b));
        // loop midpoint exists
        assert!(wg
            .node_of_point(&Point::on_edge("e", r("1/2")))
            .is_ok());
        // N = 2 turns the loop into a parallel pair
        let m = wg.node_of_point(&Point::on_edge("e", r("1/2"))).unwrap();
        let v = wg.node_of_point(&Point::vertex("v")).unwrap();
        assert_eq!(wg.multiplicity(v, m), 2);
    }

    #[test]
    fn rational_lengths_fold_into_refinement() {
        let g = MetricGraph::new(
            vec![("u".into(), 0), ("v".into(), 0)],
            vec![
                ("e1".into(), "u".into(), "v".into(), r("3/2")),
                ("e2".into(), "u".into(), "v".into(), r("1/2")),
            ],
        )
        .unwrap();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        assert_eq!(wg.refinement(), 4);
        // 3/2 * 4 = 6 segments, 1/2 * 4 = 2 segments
        assert_eq!(wg.edge_count(), 8);
        assert_eq!(wg.node_count(), 2 + 5 + 1);
        assert_eq!(wg.genus(), g.genus().unweighted);
    }

    #[test]
    fn denominators_widen_the_grid() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[3]).unwrap();
        assert_eq!(wg.refinement(), 6);
        let p = Point::on_edge("e1", r("1/3"));
        let node = wg.node_of_point(&p).unwrap();
        assert_eq!(wg.point_of_node(node), p);
        // off-grid points are refinement errors
        let narrow = WorkingGraph::new(&g, &[1]).unwrap();
        assert!(narrow.node_of_point(&p).is_err());
    }

    #[test]
    fn point_round_trip_on_every_node() {
        let g = corpus::ladder4();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        for node in 0..wg.node_count() {
            let p = wg.point_of_node(node);
            assert_eq!(wg.node_of_point(&p).unwrap(), node);
        }
    }

    #[test]
    fn single_vertex_no_edges() {
        let g = MetricGraph::new(vec![("v".into(), 3)], vec![]).unwrap();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        assert_eq!(wg.node_count(), 1);
        assert_eq!(wg.edge_count(), 0);
        assert_eq!(wg.genus(), 0);
    }

    #[test]
    fn rejects_odd_refinement() {
        let g = corpus::theta();
        assert!(WorkingGraph::with_refinement(&g, 3).is_err());
        assert!(WorkingGraph::with_refinement(&g, 0).is_err());
    }
}
