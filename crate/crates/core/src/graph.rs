//! Vertex-weighted metric graphs.
//!
//! A `MetricGraph` is a finite connected multigraph with positive rational
//! edge lengths and nonnegative integer vertex weights. Loops and parallel
//! edges are allowed. Vertex and edge ids are opaque strings; all iteration
//! is in id-lexicographic order so every derived object is deterministic.
//!
//! Edges store a (tail, head) pair purely as a parametrization: offsets of
//! interior points are measured from the tail. No operation depends on edge
//! direction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct VertexData {
    pub id: String,
    pub weight: u32,
}

#[derive(Debug, Clone)]
pub struct EdgeData {
    pub id: String,
    /// Index of the tail vertex (offset 0).
    pub tail: usize,
    /// Index of the head vertex (offset = length).
    pub head: usize,
    pub length: Rational,
}

/// A point of the metric graph: a vertex, or an interior point of an edge at
/// a rational offset from the edge's tail with `0 < offset < length`.
/// Endpoints must use the `Vertex` form; `OnEdge` with offset 0 or the full
/// length is rejected at validation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(String),
    OnEdge { edge: String, offset: Rational },
}

impl Point {
    pub fn vertex(id: impl Into<String>) -> Self {
        Point::Vertex(id.into())
    }

    pub fn on_edge(edge: impl Into<String>, offset: Rational) -> Self {
        Point::OnEdge {
            edge: edge.into(),
            offset,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{v}"),
            Point::OnEdge { edge, offset } => write!(f, "{edge}@{offset}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertices: Vec<VertexData>,
    edges: Vec<EdgeData>,
    vindex: BTreeMap<String, usize>,
    eindex: BTreeMap<String, usize>,
}

/// Genus data of a metric graph: `unweighted` is the first Betti number
/// |E| - |V| + 1, `weighted` adds the sum of the vertex weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Genus {
    pub unweighted: i64,
    pub weighted: i64,
}

impl MetricGraph {
    /// Builds and validates a graph. Vertices and edges are re-sorted by id.
    pub fn new(
        vertices: Vec<(String, u32)>,
        edges: Vec<(String, String, String, Rational)>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid_graph("graph needs at least one vertex"));
        }
        let mut vs: Vec<VertexData> = vertices
            .into_iter()
            .map(|(id, weight)| VertexData { id, weight })
            .collect();
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut vindex = BTreeMap::new();
        for (i, v) in vs.iter().enumerate() {
            if vindex.insert(v.id.clone(), i).is_some() {
                return Err(Error::invalid_graph(format!("duplicate vertex id `{}`", v.id)));
            }
        }
        let mut es: Vec<(String, String, String, Rational)> = edges;
        es.sort_by(|a, b| a.0.cmp(&b.0));
        let mut eindex = BTreeMap::new();
        let mut edata = Vec::with_capacity(es.len());
        for (i, (id, tail, head, length)) in es.into_iter().enumerate() {
            if eindex.insert(id.clone(), i).is_some() {
                return Err(Error::invalid_graph(format!("duplicate edge id `{id}`")));
            }
            let t = *vindex
                .get(&tail)
                .ok_or_else(|| Error::invalid_graph(format!("edge `{id}` references unknown vertex `{tail}`")))?;
            let h = *vindex
                .get(&head)
                .ok_or_else(|| Error::invalid_graph(format!("edge `{id}` references unknown vertex `{head}`")))?;
            if !length.is_positive() {
                return Err(Error::invalid_graph(format!(
                    "edge `{id}` must have positive length, got {length}"
                )));
            }
            edata.push(EdgeData {
                id,
                tail: t,
                head: h,
                length,
            });
        }
        let g = MetricGraph {
            vertices: vs,
            edges: edata,
            vindex,
            eindex,
        };
        if !g.is_connected() {
            return Err(Error::invalid_graph("graph must be connected"));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vindex.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.eindex.get(id).copied()
    }

    pub fn vertex_id(&self, index: usize) -> &str {
        &self.vertices[index].id
    }

    pub fn weight(&self, index: usize) -> u32 {
        self.vertices[index].weight
    }

    pub fn total_weight(&self) -> i64 {
        self.vertices.iter().map(|v| v.weight as i64).sum()
    }

    /// Valence of a vertex: number of incident edge ends (a loop counts twice).
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == v) as usize)
            .sum()
    }

    /// Id of the lexicographically smallest vertex, the default base point.
    pub fn default_base(&self) -> Point {
        Point::Vertex(self.vertices[0].id.clone())
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// Validates a point against this graph.
    pub fn validate_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) => {
                if self.vindex.contains_key(v) {
                    Ok(())
                } else {
                    Err(Error::invalid_input(format!("unknown vertex `{v}`")))
                }
            }
            Point::OnEdge { edge, offset } => {
                let e = self
                    .eindex
                    .get(edge)
                    .ok_or_else(|| Error::invalid_input(format!("unknown edge `{edge}`")))?;
                let len = self.edges[*e].length;
                if offset.is_positive() && *offset < len {
                    Ok(())
                } else {
                    Err(Error::invalid_input(format!(
                        "offset {offset} on edge `{edge}` must lie strictly between 0 and {len}; \
                         endpoints must use the vertex form"
                    )))
                }
            }
        }
    }

    /// Genus: first Betti number and its weighted refinement.
    pub fn genus(&self) -> Genus {
        let b1 = self.edges.len() as i64 - self.vertices.len() as i64 + 1;
        Genus {
            unweighted: b1,
            weighted: b1 + self.total_weight(),
        }
    }

    /// The virtual weightless graph: every vertex weight is converted into
    /// that many unit-length loops at the vertex, and all weights drop to 0.
    /// The metric graph itself embeds unchanged (same vertex and edge ids).
    pub fn virtual_weightless(&self) -> MetricGraph {
        let vertices = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), 0u32))
            .collect();
        let mut edges: Vec<(String, String, String, Rational)> = self
            .edges
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    self.vertices[e.tail].id.clone(),
                    self.vertices[e.head].id.clone(),
                    e.length,
                )
            })
            .collect();
        for v in &self.vertices {
            for k in 0..v.weight {
                let mut id = format!("{}.w{}", v.id, k);
                while self.eindex.contains_key(&id) {
                    id.push('\'');
                }
                edges.push((id, v.id.clone(), v.id.clone(), Rational::integer(1)));
            }
        }
        MetricGraph::new(vertices, edges).expect("virtual weightless graph is valid")
    }

    /// All bridge edges (non-loop edges whose removal disconnects the graph),
    /// as edge indices in id order.
    pub fn bridges(&self) -> Vec<usize> {
        // Tarjan bridge finding on the multigraph; parallel edges and loops
        // are never bridges.
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail != e.head {
                adj[e.tail].push((e.head, i));
                adj[e.head].push((e.tail, i));
            }
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridges = Vec::new();
        let mut timer = 0usize;
        // Iterative DFS to avoid recursion limits.
        let mut stack: Vec<(usize, usize, usize)> = Vec::new(); // (vertex, parent edge, adj cursor)
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            stack.push((root, usize::MAX, 0));
            while !stack.is_empty() {
                let top = stack.len() - 1;
                let (u, pe, cursor) = stack[top];
                if cursor < adj[u].len() {
                    stack[top].2 += 1;
                    let (w, ei) = adj[u][cursor];
                    if ei == pe {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, ei, 0));
                    } else {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] > disc[p] {
                            bridges.push(pe);
                        }
                    }
                }
            }
        }
        bridges.sort_unstable();
        bridges
    }

    /// Connected components after removing one edge; used for bridge sides.
    fn components_without_edge(&self, skip: usize) -> Vec<usize> {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if i == skip {
                continue;
            }
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Per-bridge side data and per-vertex positive-type bridge counts.
    pub fn bridge_report(&self) -> BridgeReport {
        let mut entries = Vec::new();
        let mut positive_counts: BTreeMap<String, usize> = BTreeMap::new();
        for v in &self.vertices {
            positive_counts.insert(v.id.clone(), 0);
        }
        for ei in self.bridges() {
            let e = &self.edges[ei];
            let comp = self.components_without_edge(ei);
            let side_of_tail = comp[e.tail];
            let mut side_genus = [0i64; 2]; // index 0: tail side, 1: head side
            let mut side_vertices = [0i64; 2];
            let mut side_weight = [0i64; 2];
            let mut side_edges = [0i64; 2];
            for (vi, vd) in self.vertices.iter().enumerate() {
                let side = (comp[vi] != side_of_tail) as usize;
                side_vertices[side] += 1;
                side_weight[side] += vd.weight as i64;
            }
            for (fi, f) in self.edges.iter().enumerate() {
                if fi == ei {
                    continue;
                }
                let side = (comp[f.tail] != side_of_tail) as usize;
                side_edges[side] += 1;
            }
            for side in 0..2 {
                side_genus[side] = side_edges[side] - side_vertices[side] + 1 + side_weight[side];
            }
            let positive = side_genus[0] >= 1 && side_genus[1] >= 1;
            if positive {
                for v in [e.tail, e.head] {
                    *positive_counts.get_mut(&self.vertices[v].id).unwrap() += 1;
                }
            }
            entries.push(BridgeEntry {
                edge: e.id.clone(),
                tail_side_genus: side_genus[0],
                head_side_genus: side_genus[1],
                positive_type: positive,
            });
        }
        BridgeReport {
            bridges: entries,
            positive_counts,
        }
    }

    /// Checks that every vertex v has at most 2*weight(v) + 2 emanating
    /// positive-type bridges (a bridge both of whose sides have weighted
    /// genus >= 1). Returns the first violating vertex in id order, if any.
    pub fn check_condition_i(&self) -> ConditionIVerdict {
        let report = self.bridge_report();
        for v in &self.vertices {
            let count = report.positive_counts[&v.id];
            let bound = 2 * v.weight as usize + 2;
            if count > bound {
                return ConditionIVerdict {
                    holds: false,
                    witness: Some(ConditionIWitness {
                        vertex: v.id.clone(),
                        count,
                        bound,
                    }),
                };
            }
        }
        ConditionIVerdict {
            holds: true,
            witness: None,
        }
    }

    /// Contracts a set of bridge edges. Each contracted edge's endpoints
    /// merge into a single vertex named by the lexicographically smallest
    /// member id, with weights added. Errors if any edge in the set is not a
    /// bridge. Returns the contracted graph and the retraction map.
    pub fn contract_edges(&self, edge_ids: &[String]) -> Result<(MetricGraph, PointMap)> {
        let bridges: BTreeSet<usize> = self.bridges().into_iter().collect();
        let mut contracted = BTreeSet::new();
        for id in edge_ids {
            let ei = self
                .eindex
                .get(id)
                .ok_or_else(|| Error::invalid_input(format!("unknown edge `{id}`")))?;
            if !bridges.contains(ei) {
                return Err(Error::precondition(format!(
                    "edge `{id}` is not a bridge; only bridges can be contracted"
                )));
            }
            contracted.insert(*ei);
        }
        // Union-find over vertices along contracted edges.
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for &ei in &contracted {
            let e = &self.edges[ei];
            let a = find(&mut parent, e.tail);
            let b = find(&mut parent, e.head);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        // Cluster representative: smallest vertex id in the cluster; since
        // vertices are sorted by id, the smallest index has the smallest id.
        let mut rep_id: Vec<String> = Vec::with_capacity(n);
        let mut cluster_weight: BTreeMap<usize, u32> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            *cluster_weight.entry(r).or_insert(0) += self.vertices[v].weight;
        }
        for v in 0..n {
            let r = find(&mut parent, v);
            rep_id.push(self.vertices[r].id.clone());
        }
        let mut new_vertices: Vec<(String, u32)> = Vec::new();
        for (&r, &w) in &cluster_weight {
            new_vertices.push((self.vertices[r].id.clone(), w));
        }
        let mut new_edges = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if contracted.contains(&ei) {
                continue;
            }
            new_edges.push((
                e.id.clone(),
                rep_id[e.tail].clone(),
                rep_id[e.head].clone(),
                e.length,
            ));
        }
        let graph = MetricGraph::new(new_vertices, new_edges)?;
        let mut vertex_to = BTreeMap::new();
        for v in 0..n {
            if self.vertices[v].id != rep_id[v] {
                vertex_to.insert(self.vertices[v].id.clone(), rep_id[v].clone());
            }
        }
        let mut edge_to_vertex = BTreeMap::new();
        for &ei in &contracted {
            let e = &self.edges[ei];
            edge_to_vertex.insert(e.id.clone(), rep_id[e.tail].clone());
        }
        Ok((
            graph,
            PointMap {
                vertex_to,
                edge_to_vertex,
            },
        ))
    }

    /// Repeatedly deletes leaf edges whose valence-1 end has weight 0 (the
    /// smallest-id leaf first each round). The result is a subgraph of
    /// `self`: surviving vertices and edges keep their ids and lengths.
    /// Returns the contracted graph and the retraction onto it.
    pub fn contract_zero_weight_leaf_edges(&self) -> (MetricGraph, PointMap) {
        let mut alive_v: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut alive_e: BTreeSet<usize> = (0..self.edges.len()).collect();
        let mut vertex_to: BTreeMap<String, String> = BTreeMap::new();
        let mut edge_to_vertex: BTreeMap<String, String> = BTreeMap::new();
        loop {
            // valence within the surviving subgraph
            let mut valence: BTreeMap<usize, usize> = alive_v.iter().map(|&v| (v, 0)).collect();
            for &ei in &alive_e {
                let e = &self.edges[ei];
                *valence.get_mut(&e.tail).unwrap() += 1;
                *valence.get_mut(&e.head).unwrap() += 1;
            }
            if alive_v.len() == 1 {
                break;
            }
            let leaf = alive_v
                .iter()
                .copied()
                .find(|&v| valence[&v] == 1 && self.vertices[v].weight == 0);
            let Some(leaf) = leaf else { break };
            let ei = *alive_e
                .iter()
                .find(|&&ei| self.edges[ei].tail == leaf || self.edges[ei].head == leaf)
                .expect("leaf has exactly one incident edge");
            let e = &self.edges[ei];
            let anchor = if e.tail == leaf { e.head } else { e.tail };
            let anchor_id = self.vertices[anchor].id.clone();
            // Points already retracting to the removed leaf now retract to
            // the anchor.
            for target in vertex_to.values_mut().chain(edge_to_vertex.values_mut()) {
                if *target == self.vertices[leaf].id {
                    *target = anchor_id.clone();
                }
            }
            vertex_to.insert(self.vertices[leaf].id.clone(), anchor_id.clone());
            edge_to_vertex.insert(e.id.clone(), anchor_id);
            alive_v.remove(&leaf);
            alive_e.remove(&ei);
        }
        let vertices = alive_v
            .iter()
            .map(|&v| (self.vertices[v].id.clone(), self.vertices[v].weight))
            .collect();
        let edges = alive_e
            .iter()
            .map(|&ei| {
                let e = &self.edges[ei];
                (
                    e.id.clone(),
                    self.vertices[e.tail].id.clone(),
                    self.vertices[e.head].id.clone(),
                    e.length,
                )
            })
            .collect();
        let graph = MetricGraph::new(vertices, edges).expect("leaf deletion keeps the graph valid");
        (
            graph,
            PointMap {
                vertex_to,
                edge_to_vertex,
            },
        )
    }

    /// The canonical model: suppresses valence-2 vertices by merging their
    /// two incident edges (when `weighted` is true, vertices of positive
    /// weight are kept). Errors when the underlying metric space is a circle,
    /// which has no canonical vertex set.
    pub fn canonical_model(&self, weighted: bool) -> Result<MetricGraph> {
        let mut vertices: BTreeMap<String, u32> = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), v.weight))
            .collect();
        let mut edges: BTreeMap<String, (String, String, Rational)> = self
            .edges
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    (
                        self.vertices[e.tail].id.clone(),
                        self.vertices[e.head].id.clone(),
                        e.length,
                    ),
                )
            })
            .collect();
        loop {
            let mut suppressed = false;
            let ids: Vec<String> = vertices.keys().cloned().collect();
            for vid in ids {
                if weighted && vertices[&vid] > 0 {
                    continue;
                }
                let incident: Vec<String> = edges
                    .iter()
                    .filter(|(_, (t, h, _))| *t == vid || *h == vid)
                    .map(|(id, _)| id.clone())
                    .collect();
                let ends: usize = incident
                    .iter()
                    .map(|eid| {
                        let (t, h, _) = &edges[eid];
                        (*t == vid) as usize + (*h == vid) as usize
                    })
                    .sum();
                if ends != 2 || incident.len() != 2 {
                    // valence != 2, or a loop (the circle case handled below)
                    continue;
                }
                let (e1, e2) = (incident[0].clone(), incident[1].clone());
                let (t1, h1, l1) = edges[&e1].clone();
                let (t2, h2, l2) = edges[&e2].clone();
                let a = if t1 == vid { h1 } else { t1 };
                let b = if t2 == vid { h2 } else { t2 };
                let merged_id = if e1 <= e2 { e1.clone() } else { e2.clone() };
                edges.remove(&e1);
                edges.remove(&e2);
                edges.insert(merged_id, (a, b, l1 + l2));
                vertices.remove(&vid);
                suppressed = true;
                break;
            }
            if !suppressed {
                break;
            }
        }
        // Circle detection: one vertex carrying a single loop, and that
        // vertex itself suppressible.
        if vertices.len() == 1 && edges.len() == 1 {
            let (vid, &w) = vertices.iter().next().unwrap();
            let (t, h, _) = edges.values().next().unwrap();
            if t == h && t == vid && (!weighted || w == 0) {
                return Err(Error::precondition(
                    "the underlying metric space is a circle; it has no canonical model",
                ));
            }
        }
        MetricGraph::new(
            vertices.into_iter().collect(),
            edges
                .into_iter()
                .map(|(id, (t, h, l))| (id, t, h, l))
                .collect(),
        )
    }
}

/// Retraction produced by a contraction: maps points of the source graph to
/// points of the target graph. Unlisted vertices and edges map to themselves.
#[derive(Debug, Clone, Default)]
pub struct PointMap {
    /// Renamed/merged vertices.
    pub vertex_to: BTreeMap<String, String>,
    /// Contracted edges: every point of the edge maps to this vertex.
    pub edge_to_vertex: BTreeMap<String, String>,
}

impl PointMap {
    pub fn map_point(&self, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => match self.vertex_to.get(v) {
                Some(t) => Point::Vertex(t.clone()),
                None => p.clone(),
            },
            Point::OnEdge { edge, offset } => match self.edge_to_vertex.get(edge) {
                Some(t) => Point::Vertex(t.clone()),
                None => Point::OnEdge {
                    edge: edge.clone(),
                    offset: *offset,
                },
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct BridgeEntry {
    pub edge: String,
    pub tail_side_genus: i64,
    pub head_side_genus: i64,
    /// Both sides have weighted genus >= 1.
    pub positive_type: bool,
}

#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub bridges: Vec<BridgeEntry>,
    /// Per-vertex count of emanating positive-type bridges.
    pub positive_counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct ConditionIWitness {
    pub vertex: String,
    pub count: usize,
    pub bound: usize,
}

#[derive(Debug, Clone)]
pub struct ConditionIVerdict {
    pub holds: bool,
    pub witness: Option<ConditionIWitness>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(MetricGraph::new(vec![], vec![]).is_err());
        // duplicate vertex id
        assert!(MetricGraph::new(
            vec![("v".into(), 0), ("v".into(), 0)],
            vec![("e".into(), "v".into(), "v".into(), r("1"))],
        )
        .is_err());
        // nonpositive length
        assert!(MetricGraph::new(
            vec![("u".into(), 0), ("v".into(), 0)],
            vec![("e".into(), "u".into(), "v".into(), r("0"))],
        )
        .is_err());
        // disconnected
        assert!(MetricGraph::new(vec![("u".into(), 0), ("v".into(), 0)], vec![]).is_err());
        // unknown endpoint
        assert!(MetricGraph::new(
            vec![("u".into(), 0)],
            vec![("e".into(), "u".into(), "x".into(), r("1"))],
        )
        .is_err());
    }

    #[test]
    fn single_vertex_graph_is_legal_with_weighted_genus() {
        let g = MetricGraph::new(vec![("v".into(), 2)], vec![]).unwrap();
        assert_eq!(g.genus(), Genus { unweighted: 0, weighted: 2 });
    }

    #[test]
    fn point_validation() {
        let g = corpus::theta();
        assert!(g.validate_point(&Point::vertex("u")).is_ok());
        assert!(g.validate_point(&Point::vertex("zz")).is_err());
        assert!(g.validate_point(&Point::on_edge("e1", r("1/2"))).is_ok());
        assert!(g.validate_point(&Point::on_edge("e1", r("0"))).is_err());
        assert!(g.validate_point(&Point::on_edge("e1", r("1"))).is_err());
        assert!(g.validate_point(&Point::on_edge("e9", r("1/2"))).is_err());
    }

    #[test]
    fn corpus_genus_values() {
        assert_eq!(corpus::theta().genus().unweighted, 2);
        for g in 2..=5 {
            assert_eq!(corpus::banana(g).genus().unweighted, g as i64);
        }
        assert_eq!(corpus::three_petal().genus().unweighted, 3);
        assert_eq!(corpus::ladder4().genus().unweighted, 4);
        assert_eq!(corpus::k4().genus().unweighted, 3);
        assert_eq!(corpus::path3().genus().unweighted, 0);
        assert_eq!(corpus::cycle3().genus().unweighted, 1);
        let w = corpus::weighted_vertex(2);
        assert_eq!(w.genus(), Genus { unweighted: 0, weighted: 2 });
    }

    #[test]
    fn virtual_weightless_adds_unit_loops_and_preserves_weighted_genus() {
        let g = corpus::weighted_vertex(2);
        let vw = g.virtual_weightless();
        assert_eq!(vw.vertices().len(), 1);
        assert_eq!(vw.edges().len(), 2);
        assert_eq!(vw.genus().unweighted, g.genus().weighted);
        assert_eq!(vw.total_weight(), 0);

        // mixed case: segment with one weighted end
        let seg = MetricGraph::new(
            vec![("u".into(), 0), ("v".into(), 1)],
            vec![("e".into(), "u".into(), "v".into(), r("1"))],
        )
        .unwrap();
        let vw = seg.virtual_weightless();
        assert_eq!(vw.edges().len(), 2);
        assert_eq!(vw.genus().unweighted, seg.genus().weighted);
    }

    #[test]
    fn three_petal_bridges_and_condition_i() {
        let g = corpus::three_petal();
        let bridge_ids: Vec<&str> = g
            .bridges()
            .into_iter()
            .map(|ei| g.edges()[ei].id.as_str())
            .collect();
        assert_eq!(bridge_ids, vec!["e1", "e2", "e3"]);
        let report = g.bridge_report();
        assert!(report.bridges.iter().all(|b| b.positive_type));
        assert_eq!(report.positive_counts["v0"], 3);
        let verdict = g.check_condition_i();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert_eq!(w.vertex, "v0");
        assert_eq!(w.count, 3);
        assert_eq!(w.bound, 2);
    }

    #[test]
    fn ladder4_is_bridgeless_and_satisfies_condition_i() {
        let g = corpus::ladder4();
        assert!(g.bridges().is_empty());
        assert!(g.check_condition_i().holds);
        assert!(corpus::banana(3).check_condition_i().holds);
    }

    #[test]
    fn bridge_side_genus_on_dumbbell() {
        let g = corpus::dumbbell();
        let report = g.bridge_report();
        assert_eq!(report.bridges.len(), 1);
        let b = &report.bridges[0];
        assert_eq!(b.edge, "b");
        assert_eq!(b.tail_side_genus, 1);
        assert_eq!(b.head_side_genus, 1);
        assert!(b.positive_type);
    }

    #[test]
    fn contract_edges_rejects_non_bridges() {
        let g = corpus::theta();
        assert!(g.contract_edges(&["e1".into()]).is_err());
    }

    #[test]
    fn contract_bridges_preserves_weighted_genus() {
        let g = corpus::three_petal();
        let (c, map) = g
            .contract_edges(&["e1".into(), "e2".into(), "e3".into()])
            .unwrap();
        assert_eq!(c.genus(), g.genus());
        assert_eq!(c.vertices().len(), 4);
        assert_eq!(c.edges().len(), 6);
        assert!(c.bridges().is_empty());
        // The cluster {v0, v1, v3, v5} is represented by its smallest id.
        assert_eq!(map.map_point(&Point::vertex("v1")), Point::vertex("v0"));
        assert_eq!(
            map.map_point(&Point::on_edge("e1", r("1/2"))),
            Point::vertex("v0")
        );
        assert_eq!(map.map_point(&Point::vertex("v2")), Point::vertex("v2"));
    }

    #[test]
    fn leaf_contraction_examples() {
        // segment with one weighted end collapses onto the weighted vertex
        let seg = MetricGraph::new(
            vec![("u".into(), 0), ("v".into(), 1)],
            vec![("e".into(), "u".into(), "v".into(), r("1"))],
        )
        .unwrap();
        let (c, map) = seg.contract_zero_weight_leaf_edges();
        assert_eq!(c.vertices().len(), 1);
        assert_eq!(c.vertices()[0].id, "v");
        assert_eq!(map.map_point(&Point::vertex("u")), Point::vertex("v"));

        // a weightless tree collapses to a single vertex
        let (c, _) = corpus::path3().contract_zero_weight_leaf_edges();
        assert_eq!(c.vertices().len(), 1);
        assert_eq!(c.genus().weighted, 0);

        // graphs without zero-weight leaves are untouched
        let (c, _) = corpus::theta().contract_zero_weight_leaf_edges();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(c.edges().len(), 3);
    }

    #[test]
    fn canonical_model_of_ladder4() {
        let g = corpus::ladder4();
        let c = g.canonical_model(true).unwrap();
        assert_eq!(c.vertices().len(), 6);
        assert_eq!(c.edges().len(), 9);
        assert_eq!(c.genus().unweighted, 4);
        let total: Rational = c
            .edges()
            .iter()
            .fold(Rational::zero(), |acc, e| acc + e.length);
        assert_eq!(total, r("14"));
        let mut lengths: Vec<String> = c.edges().iter().map(|e| e.length.to_string()).collect();
        lengths.sort();
        assert_eq!(lengths, vec!["1", "1", "1", "1", "2", "2", "2", "2", "2"]);
    }

    #[test]
    fn canonical_model_rejects_circles() {
        assert!(corpus::cycle3().canonical_model(true).is_err());
        let loop_graph = MetricGraph::new(
            vec![("v".into(), 0)],
            vec![("e".into(), "v".into(), "v".into(), r("1"))],
        )
        .unwrap();
        assert!(loop_graph.canonical_model(true).is_err());
        // ... but a weighted circle keeps its weighted vertex
        let wloop = MetricGraph::new(
            vec![("v".into(), 1)],
            vec![("e".into(), "v".into(), "v".into(), r("1"))],
        )
        .unwrap();
        assert!(wloop.canonical_model(true).is_ok());
        assert!(wloop.canonical_model(false).is_err());
    }

    #[test]
    fn canonical_model_weighted_flag() {
        // path of two unit edges with a weighted middle vertex
        let g = MetricGraph::new(
            vec![("a".into(), 0), ("m".into(), 1), ("z".into(), 0)],
            vec![
                ("e1".into(), "a".into(), "m".into(), r("1")),
                ("e2".into(), "m".into(), "z".into(), r("1")),
            ],
        )
        .unwrap();
        let keep = g.canonical_model(true).unwrap();
        assert_eq!(keep.vertices().len(), 3);
        let drop = g.canonical_model(false).unwrap();
        assert_eq!(drop.vertices().len(), 2);
        assert_eq!(drop.edges()[0].length, r("2"));
    }
}
