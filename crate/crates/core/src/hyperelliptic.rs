//! Hyperelliptic structure: the rank-one pencil of degree two, the
//! involution that realizes it, and the closed-form rank it yields.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::automorphism::{self, GraphInvolution};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Point, PointMap};
use crate::rank::RankEngine;
use crate::rational::Rational;
use crate::reduce;
use crate::working::{Node, WorkingGraph};

/// A certified hyperelliptic involution: the weightless model of the input,
/// its leaf-contracted core, a working graph over the core, and the unique
/// order-two automorphism whose quotient is a tree.
#[derive(Debug, Clone)]
pub struct InvolutionCert {
    model: MetricGraph,
    retraction: PointMap,
    core: MetricGraph,
    working: WorkingGraph,
    pub involution: GraphInvolution,
    genus: i64,
}

impl InvolutionCert {
    /// Weightless model the certificate was computed on.
    pub fn model(&self) -> &MetricGraph {
        &self.model
    }

    /// Retraction of the model onto its leafless core.
    pub fn retraction(&self) -> &PointMap {
        &self.retraction
    }

    /// Leaf-contracted core; the involution lives on its working graph.
    pub fn core(&self) -> &MetricGraph {
        &self.core
    }

    pub fn working(&self) -> &WorkingGraph {
        &self.working
    }

    /// Genus of the core (the weighted genus of the certified graph).
    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn fixed_nodes(&self) -> Vec<usize> {
        self.involution.fixed_nodes()
    }

    pub fn fixed_points(&self) -> Vec<Point> {
        self.fixed_nodes()
            .into_iter()
            .map(|n| self.working.point_of_node(n))
            .collect()
    }

    pub fn quotient_genus(&self) -> i64 {
        automorphism::quotient_genus(&self.working, &self.involution)
    }

    /// The degree-2, rank-1 class: [v] + [involution(v)] at the id-smallest
    /// core vertex. Points are named on the core, hence on the weightless
    /// model; they name points of the original graph whenever the involution
    /// image avoids the virtual loops of weighted vertices.
    pub fn g12_class(&self) -> Divisor {
        // vertices are sorted by id, so index 0 is the id-smallest
        let n = self.working.base_vertex_node(0);
        let m = self.involution.node_map[n];
        let mut d = Divisor::zero();
        d.add_coeff(self.working.point_of_node(n), 1);
        d.add_coeff(self.working.point_of_node(m), 1);
        d
    }

    /// Largest r such that d minus r copies of the pencil stays effective up
    /// to equivalence; computed as floor(c/2) where c is the coefficient of
    /// a fixed point in the divisor reduced there.
    pub fn p_value(&self, d: &Divisor) -> Result<i64> {
        let v0 = *self
            .fixed_nodes()
            .first()
            .ok_or_else(|| Error::internal("hyperelliptic involution with no fixed point"))?;
        self.p_value_at(d, v0)
    }

    /// Same as `p_value` but at a caller-chosen fixed node of the
    /// involution; the result does not depend on the choice.
    pub fn p_value_at(&self, d: &Divisor, fixed_node: usize) -> Result<i64> {
        if self.involution.node_map[fixed_node] != fixed_node {
            return Err(Error::precondition(format!(
                "node {fixed_node} is not fixed by the involution"
            )));
        }
        if !d.is_effective() {
            return Err(Error::precondition(
                "p is defined for effective divisors only",
            ));
        }
        let pushed = d.pushforward(&self.retraction);
        let v0 = self.working.point_of_node(fixed_node);
        // reduce on the unit working graph when the divisor already lies on
        // its grid, otherwise on a refinement that still carries v0
        let result = if pushed.to_vec(&self.working).is_ok() {
            reduce::reduce(&self.working, &pushed, &v0)?
        } else {
            let mut denominators = pushed.denominators();
            denominators.push(self.working.refinement());
            let finer = WorkingGraph::new(&self.core, &denominators)?;
            reduce::reduce(&finer, &pushed, &v0)?
        };
        Ok(result.reduced.coeff(&v0).div_euclid(2))
    }

    /// Closed-form rank of an effective divisor on a hyperelliptic graph.
    pub fn hyp_rank(&self, d: &Divisor) -> Result<i64> {
        let p = self.p_value(d)?;
        let deg = d.degree();
        Ok(if deg - p <= self.genus { p } else { deg - self.genus })
    }
}

/// Searches for the hyperelliptic involution. `None` means no order-two
/// automorphism of the core has a tree quotient, which refutes
/// hyperellipticity; more than one surviving candidate is impossible and
/// reported as an internal error.
pub fn find_involution(g: &MetricGraph) -> Result<Option<InvolutionCert>> {
    let genus = g.genus().weighted;
    if genus < 2 {
        return Err(Error::precondition(format!(
            "hyperelliptic structure requires genus at least 2, got {genus}"
        )));
    }
    let model = g.virtual_weightless();
    let (core, retraction) = model.contract_zero_weight_leaf_edges();
    let working = WorkingGraph::new(&core, &[1])?;

    // Bridges are pointwise fixed by any tree-quotient involution, so the
    // search happens on the bridge-contracted inner graph and the result is
    // lifted back, with the bridges frozen.
    let bridge_ids: Vec<String> = core
        .bridges()
        .into_iter()
        .map(|ei| core.edges()[ei].id.clone())
        .collect();
    let (inner, _to_inner) = core.contract_edges(&bridge_ids)?;
    let inner_working = WorkingGraph::with_refinement(&inner, working.refinement())?;

    let lift = Lift::new(&core, &working, &inner, &inner_working);
    let mut found: Vec<GraphInvolution> = Vec::new();
    for candidate in automorphism::tree_quotient_involutions(&inner_working)? {
        if let Some(lifted) = lift.apply(&candidate) {
            if automorphism::quotient_genus(&working, &lifted) == 0 && !found.contains(&lifted) {
                found.push(lifted);
            }
        }
    }
    match found.len() {
        0 => Ok(None),
        1 => {
            let involution = found.pop().expect("one element");
            debug_assert!(automorphism::validate_involution(&working, &involution).is_ok());
            Ok(Some(InvolutionCert {
                model,
                retraction,
                core,
                working,
                involution,
                genus,
            }))
        }
        _ => Err(Error::internal(
            "more than one tree-quotient involution survived the bridge lift",
        )),
    }
}

/// Lifts involutions of the bridge-contracted working graph back to the
/// core's working graph. Both graphs share one refinement, so interior grid
/// points and unit segments correspond through (edge id, step).
struct Lift<'a> {
    core: &'a MetricGraph,
    working: &'a WorkingGraph,
    inner: &'a MetricGraph,
    inner_working: &'a WorkingGraph,
    bridge_edge: Vec<bool>,
    bridge_vertex: Vec<bool>,
    /// Inner-working nodes that any liftable candidate must fix: the images
    /// of contracted bridge clusters.
    frozen: Vec<usize>,
    inner_edge_of: Vec<Option<usize>>,
    core_edge_of: Vec<usize>,
    node2: std::collections::BTreeMap<(usize, i64), usize>,
    node3: std::collections::BTreeMap<(usize, i64), usize>,
    edge2: std::collections::BTreeMap<(usize, i64), usize>,
    edge3: std::collections::BTreeMap<(usize, i64), usize>,
}

fn interior_nodes(wg: &WorkingGraph) -> std::collections::BTreeMap<(usize, i64), usize> {
    wg.nodes()
        .iter()
        .enumerate()
        .filter_map(|(n, node)| match node {
            Node::Interior(e, s, _) => Some(((*e, *s), n)),
            Node::Base(_) => None,
        })
        .collect()
}

fn segment_edges(wg: &WorkingGraph) -> std::collections::BTreeMap<(usize, i64), usize> {
    wg.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.base_edge, e.segment), i))
        .collect()
}

impl<'a> Lift<'a> {
    fn new(
        core: &'a MetricGraph,
        working: &'a WorkingGraph,
        inner: &'a MetricGraph,
        inner_working: &'a WorkingGraph,
    ) -> Self {
        let mut bridge_edge = vec![false; core.edges().len()];
        let mut bridge_vertex = vec![false; core.vertices().len()];
        for ei in core.bridges() {
            bridge_edge[ei] = true;
            bridge_vertex[core.edges()[ei].tail] = true;
            bridge_vertex[core.edges()[ei].head] = true;
        }
        // A cluster representative incident to a bridge stands for a
        // contracted cluster; its inner-working node must stay fixed.
        let mut frozen = Vec::new();
        for (ci, cv) in inner.vertices().iter().enumerate() {
            let v = core
                .vertex_index(&cv.id)
                .expect("cluster representatives keep core vertex ids");
            if bridge_vertex[v] {
                frozen.push(inner_working.base_vertex_node(ci));
            }
        }
        let mut inner_edge_of = vec![None; core.edges().len()];
        let mut core_edge_of = vec![0usize; inner.edges().len()];
        for (j, e) in inner.edges().iter().enumerate() {
            let i = core.edge_index(&e.id).expect("inner edges keep core ids");
            inner_edge_of[i] = Some(j);
            core_edge_of[j] = i;
        }
        Lift {
            core,
            working,
            inner,
            inner_working,
            bridge_edge,
            bridge_vertex,
            frozen,
            inner_edge_of,
            core_edge_of,
            node2: interior_nodes(working),
            node3: interior_nodes(inner_working),
            edge2: segment_edges(working),
            edge3: segment_edges(inner_working),
        }
    }

    /// Inner-working node corresponding to a point that survives bridge
    /// contraction unchanged.
    fn pull_back(&self, inner_node: usize) -> Option<usize> {
        match &self.inner_working.nodes()[inner_node] {
            Node::Base(c) => {
                let v = self
                    .core
                    .vertex_index(self.inner.vertex_id(*c))
                    .expect("cluster representatives keep core vertex ids");
                if self.bridge_vertex[v] {
                    // a contracted cluster has no single preimage vertex
                    return None;
                }
                Some(self.working.base_vertex_node(v))
            }
            Node::Interior(e3, s, _) => {
                let e = self.core_edge_of[*e3];
                Some(*self.node2.get(&(e, *s)).expect("shared refinement grids align"))
            }
        }
    }

    /// Extends a candidate over the frozen bridges, or rejects it. The edge
    /// images are checked endpoint-by-endpoint: parallel inner edges may
    /// attach to different vertices of a contracted cluster, and only
    /// matchings consistent with the actual attachments lift.
    fn apply(&self, candidate: &GraphInvolution) -> Option<GraphInvolution> {
        for &n in &self.frozen {
            if candidate.node_map[n] != n {
                return None;
            }
        }
        let n2 = self.working.node_count();
        let mut node_map = vec![usize::MAX; n2];
        for n in 0..n2 {
            node_map[n] = match &self.working.nodes()[n] {
                Node::Base(v) if self.bridge_vertex[*v] => n,
                Node::Base(v) => {
                    let c = self
                        .inner
                        .vertex_index(self.core.vertex_id(*v))
                        .expect("vertices off the bridges survive contraction");
                    let image = candidate.node_map[self.inner_working.base_vertex_node(c)];
                    self.pull_back(image)?
                }
                Node::Interior(e, _, _) if self.bridge_edge[*e] => n,
                Node::Interior(e, s, _) => {
                    let e3 = self.inner_edge_of[*e].expect("non-bridge edges survive contraction");
                    let x = *self.node3.get(&(e3, *s)).expect("shared refinement grids align");
                    self.pull_back(candidate.node_map[x])?
                }
            };
        }
        if (0..n2).any(|n| node_map[node_map[n]] != n) {
            return None;
        }

        let m2 = self.working.edge_count();
        let mut edge_map = vec![usize::MAX; m2];
        for (i, we) in self.working.edges().iter().enumerate() {
            edge_map[i] = if self.bridge_edge[we.base_edge] {
                i
            } else {
                let e3 = self.inner_edge_of[we.base_edge].expect("non-bridge edge");
                let j = *self
                    .edge3
                    .get(&(e3, we.segment))
                    .expect("shared refinement grids align");
                let image = &self.inner_working.edges()[candidate.edge_map[j]];
                *self
                    .edge2
                    .get(&(self.core_edge_of[image.base_edge], image.segment))
                    .expect("shared refinement grids align")
            };
        }
        for (i, we) in self.working.edges().iter().enumerate() {
            let f = &self.working.edges()[edge_map[i]];
            let got = (f.a.min(f.b), f.a.max(f.b));
            let want = (
                node_map[we.a].min(node_map[we.b]),
                node_map[we.a].max(node_map[we.b]),
            );
            if got != want {
                return None;
            }
        }
        if (0..m2).any(|i| edge_map[edge_map[i]] != i) {
            return None;
        }
        Some(GraphInvolution { node_map, edge_map })
    }
}

/// Why a graph fails the hyperelliptic test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    GenusTooSmall { weighted_genus: i64 },
    NoRankOnePair { pairs_checked: usize },
}

/// Outcome of the hyperelliptic test: when positive, a degree-2 rank-1
/// vertex pair and the involution certificate, mutually consistent; when
/// negative, the reason.
#[derive(Debug, Clone)]
pub struct HyperellipticCert {
    pub verdict: bool,
    pub witness: Option<Divisor>,
    pub involution: Option<InvolutionCert>,
    pub refutation: Option<Refutation>,
}

/// Decides hyperellipticity by exhaustive search for a rank-1 divisor
/// [u] + [v] over unordered vertex pairs (u = v allowed); vertex pairs
/// suffice. A positive verdict is cross-checked against the involution's
/// pencil.
pub fn is_hyperelliptic(g: &MetricGraph) -> Result<HyperellipticCert> {
    let genus = g.genus().weighted;
    if genus < 2 {
        return Ok(HyperellipticCert {
            verdict: false,
            witness: None,
            involution: None,
            refutation: Some(Refutation::GenusTooSmall {
                weighted_genus: genus,
            }),
        });
    }
    let engine = RankEngine::weighted(g, &[1])?;
    let mut witness = None;
    let mut pairs_checked = 0usize;
    'pairs: for i in 0..g.vertices().len() {
        for j in i..g.vertices().len() {
            let mut d = Divisor::zero();
            d.add_coeff(Point::vertex(g.vertices()[i].id.clone()), 1);
            d.add_coeff(Point::vertex(g.vertices()[j].id.clone()), 1);
            pairs_checked += 1;
            if engine.rank(&d)? == 1 {
                witness = Some(d);
                break 'pairs;
            }
        }
    }
    let Some(witness) = witness else {
        return Ok(HyperellipticCert {
            verdict: false,
            witness: None,
            involution: None,
            refutation: Some(Refutation::NoRankOnePair { pairs_checked }),
        });
    };
    let cert = find_involution(g)?.ok_or_else(|| {
        Error::internal("a rank-one vertex pair exists but no involution was found")
    })?;
    let pencil = cert.g12_class();
    if !engine.linearly_equivalent(&witness, &pencil)?.equivalent {
        return Err(Error::internal(
            "the rank-one vertex pair is not equivalent to the involution's pencil",
        ));
    }
    Ok(HyperellipticCert {
        verdict: true,
        witness: Some(witness),
        involution: Some(cert),
        refutation: None,
    })
}

fn certified(g: &MetricGraph) -> Result<InvolutionCert> {
    find_involution(g)?
        .ok_or_else(|| Error::precondition("the graph is not hyperelliptic"))
}

/// The degree-2 rank-1 class of a hyperelliptic graph.
pub fn g12_class(g: &MetricGraph) -> Result<Divisor> {
    Ok(certified(g)?.g12_class())
}

/// See [`InvolutionCert::p_value`].
pub fn p_value(g: &MetricGraph, d: &Divisor) -> Result<i64> {
    certified(g)?.p_value(d)
}

/// See [`InvolutionCert::hyp_rank`].
pub fn hyp_rank(g: &MetricGraph, d: &Divisor) -> Result<i64> {
    certified(g)?.hyp_rank(d)
}

/// Resource guard for `wdr_enumerate`.
#[derive(Debug, Clone, Copy)]
pub struct WdrCaps {
    /// Largest number of effective grid divisors the enumeration may visit.
    pub max_candidates: u64,
}

impl Default for WdrCaps {
    fn default() -> Self {
        WdrCaps {
            max_candidates: 1_000_000,
        }
    }
}

/// Divisor classes of degree d and rank at least r with a representative on
/// the 1/denominator grid. Representatives are reduced at the default base
/// and sorted, so the output is deterministic.
#[derive(Debug, Clone)]
pub struct WdrOutput {
    pub classes: Vec<Divisor>,
    pub denominator: i64,
    /// The enumeration is exhaustive for the stated grid; it makes no claim
    /// about finer rational points.
    pub complete_for_grid: bool,
}

/// Enumerates the degree-d, rank-at-least-r classes with support on the
/// 1/denominator grid of the graph. Candidates are deduplicated by their
/// reduced representative; rank is evaluated once per class. Reduction of
/// the candidates runs in parallel; the result does not depend on the
/// schedule.
pub fn wdr_enumerate(
    g: &MetricGraph,
    d: i64,
    r: i64,
    denominator: i64,
    caps: WdrCaps,
) -> Result<WdrOutput> {
    if d < 0 || r < 0 || denominator < 1 {
        return Err(Error::precondition(
            "wdr enumeration needs d >= 0, r >= 0 and a positive denominator",
        ));
    }
    let engine = RankEngine::weighted(g, &[denominator])?;
    let wg = engine.working();

    // grid: the graph's vertices plus interior points at multiples of
    // 1/denominator (named on the weightless model, which shares them)
    let mut grid: Vec<usize> = Vec::new();
    for v in g.vertices() {
        grid.push(wg.node_of_point(&Point::vertex(v.id.clone()))?);
    }
    for e in g.edges() {
        for k in 1.. {
            let offset = Rational::new(k, denominator)?;
            if offset >= e.length {
                break;
            }
            grid.push(wg.node_of_point(&Point::on_edge(e.id.clone(), offset))?);
        }
    }

    let candidates = binomial_with_repetition(grid.len() as u64, d as u64);
    if candidates.map_or(true, |c| c > u128::from(caps.max_candidates)) {
        return Err(Error::resource_cap(format!(
            "degree {d} over a grid of {} points exceeds the candidate cap {}",
            grid.len(),
            caps.max_candidates
        )));
    }

    let nodes = wg.node_count();
    let base = engine.base_node();
    let mut classes: BTreeSet<Vec<i64>> = BTreeSet::new();
    let combos = (0..grid.len()).combinations_with_replacement(d as usize);
    for chunk in &combos.chunks(4096) {
        let batch: Vec<Vec<usize>> = chunk.collect();
        let reduced: Vec<Vec<i64>> = batch
            .par_iter()
            .map(|combo| {
                let mut dvec = vec![0i64; nodes];
                for &gi in combo {
                    dvec[grid[gi]] += 1;
                }
                let mut script = vec![0i64; nodes];
                reduce::reduce_vec(wg, &mut dvec, base, &mut script);
                dvec
            })
            .collect();
        classes.extend(reduced);
    }

    let mut out = Vec::new();
    for class in &classes {
        if engine.rank_vec(class) >= r {
            out.push(Divisor::from_vec(wg, class));
        }
    }
    Ok(WdrOutput {
        classes: out,
        denominator,
        complete_for_grid: true,
    })
}

fn binomial_with_repetition(n: u64, d: u64) -> Option<u128> {
    if d == 0 {
        return Some(1);
    }
    if n == 0 {
        return Some(0);
    }
    let mut c: u128 = 1;
    for i in 1..=d {
        c = c.checked_mul(u128::from(n - 1 + i))?;
        c /= u128::from(i);
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rank;

    fn vdiv(entries: &[(&str, i64)]) -> Divisor {
        Divisor::from_entries(
            entries
                .iter()
                .map(|&(id, c)| (Point::vertex(id), c)),
        )
    }

    #[test]
    fn theta_is_hyperelliptic_with_consistent_witnesses() {
        let g = corpus::theta();
        let cert = is_hyperelliptic(&g).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.witness.unwrap(), vdiv(&[("u", 1), ("v", 1)]));
        let inv = cert.involution.unwrap();
        assert_eq!(inv.genus(), 2);
        assert_eq!(inv.quotient_genus(), 0);
        // the hubs swap; the three edge midpoints stay put
        let half = Rational::new(1, 2).unwrap();
        assert_eq!(
            inv.fixed_points(),
            vec![
                Point::on_edge("e1", half),
                Point::on_edge("e2", half),
                Point::on_edge("e3", half),
            ]
        );
        assert_eq!(inv.g12_class(), vdiv(&[("u", 1), ("v", 1)]));
    }

    #[test]
    fn three_petal_involution_fixes_all_cut_vertices() {
        let g = corpus::three_petal();
        let inv = find_involution(&g).unwrap().unwrap();
        let fixed = inv.fixed_points();
        assert_eq!(fixed.len(), 10);
        for vid in ["v0", "v1", "v2", "v3", "v4", "v5", "v6"] {
            assert!(fixed.contains(&Point::vertex(vid)), "missing {vid}");
        }
        let half = Rational::new(1, 2).unwrap();
        for eid in ["e1", "e2", "e3"] {
            assert!(fixed.contains(&Point::on_edge(eid, half)), "missing {eid} midpoint");
        }
        assert_eq!(inv.g12_class(), vdiv(&[("v0", 2)]));
        let d = vdiv(&[("v0", 2)]);
        assert_eq!(inv.p_value(&d).unwrap(), 1);
        assert_eq!(inv.hyp_rank(&d).unwrap(), 1);
    }

    #[test]
    fn ladder_fixed_points_are_the_middle_row() {
        let g = corpus::ladder4();
        let inv = find_involution(&g).unwrap().unwrap();
        assert_eq!(
            inv.fixed_points(),
            vec![
                Point::vertex("u1"),
                Point::vertex("u2"),
                Point::vertex("u3"),
                Point::vertex("u4"),
                Point::vertex("w2"),
            ]
        );
        assert_eq!(inv.g12_class(), vdiv(&[("u1", 2)]));
        let d = vdiv(&[("v1", 3), ("v2", 1)]);
        assert_eq!(inv.p_value(&d).unwrap(), 1);
        assert_eq!(inv.hyp_rank(&d).unwrap(), 1);
    }

    #[test]
    fn k4_is_not_hyperelliptic() {
        let g = corpus::k4();
        let cert = is_hyperelliptic(&g).unwrap();
        assert!(!cert.verdict);
        assert_eq!(
            cert.refutation.unwrap(),
            Refutation::NoRankOnePair { pairs_checked: 10 }
        );
        assert!(find_involution(&g).unwrap().is_none());
    }

    #[test]
    fn low_genus_is_refused() {
        let g = corpus::cycle3();
        let cert = is_hyperelliptic(&g).unwrap();
        assert!(!cert.verdict);
        assert_eq!(
            cert.refutation.unwrap(),
            Refutation::GenusTooSmall { weighted_genus: 1 }
        );
        assert!(find_involution(&g).is_err());
        assert!(p_value(&g, &vdiv(&[("c1", 2)])).is_err());
    }

    #[test]
    fn weighted_vertex_has_the_virtual_pencil() {
        let g = corpus::weighted_vertex(2);
        let cert = is_hyperelliptic(&g).unwrap();
        assert!(cert.verdict);
        let inv = cert.involution.unwrap();
        assert_eq!(inv.g12_class(), vdiv(&[("v", 2)]));
        let d = vdiv(&[("v", 2)]);
        assert_eq!(inv.p_value(&d).unwrap(), 1);
        assert_eq!(inv.hyp_rank(&d).unwrap(), 1);
        assert_eq!(rank::rank_weighted(&g, &d).unwrap(), 1);
    }

    #[test]
    fn dumbbell_involution_swaps_each_loop() {
        let g = corpus::dumbbell();
        let inv = find_involution(&g).unwrap().unwrap();
        // both hub vertices, the bridge midpoint and the two loop midpoints
        assert_eq!(inv.fixed_points().len(), 5);
        assert_eq!(inv.g12_class(), vdiv(&[("u", 2)]));
        let d = vdiv(&[("u", 2)]);
        assert_eq!(inv.hyp_rank(&d).unwrap(), 1);
        assert_eq!(rank::rank(&g, &d).unwrap(), 1);
    }

    #[test]
    fn closed_form_matches_the_engine_past_the_genus_bound() {
        let g = corpus::banana(3);
        let d = vdiv(&[("v1", 6)]);
        assert_eq!(hyp_rank(&g, &d).unwrap(), 3);
        assert_eq!(rank::rank(&g, &d).unwrap(), 3);
    }

    #[test]
    fn p_value_is_independent_of_the_fixed_point() {
        let g = corpus::three_petal();
        let inv = find_involution(&g).unwrap().unwrap();
        let d = vdiv(&[("v0", 2), ("v4", 1)]);
        let p = inv.p_value(&d).unwrap();
        assert_eq!(p, 1);
        for node in inv.fixed_nodes() {
            assert_eq!(inv.p_value_at(&d, node).unwrap(), p);
        }
    }

    #[test]
    fn p_value_counts_pencil_copies() {
        let g = corpus::three_petal();
        let inv = find_involution(&g).unwrap().unwrap();
        let pencil = inv.g12_class();
        for d in [
            vdiv(&[("v0", 2), ("v4", 1)]),
            vdiv(&[("v2", 1), ("v4", 1), ("v6", 1)]),
            vdiv(&[("v0", 4)]),
            Divisor::zero(),
        ] {
            let p = inv.p_value(&d).unwrap();
            let at = |r: i64| rank::rank(&g, &d.sub(&pencil.scale(r)));
            assert!(at(p).unwrap() >= 0, "p copies must stay effective");
            assert!(at(p + 1).unwrap() < 0, "p must be maximal");
        }
    }

    #[test]
    fn core_bridges_are_exactly_the_fixed_edges() {
        let g = corpus::three_petal();
        let inv = find_involution(&g).unwrap().unwrap();
        let wg = inv.working();
        let is_bridge: Vec<bool> = {
            let mut b = vec![false; inv.core().edges().len()];
            for ei in inv.core().bridges() {
                b[ei] = true;
            }
            b
        };
        for (i, we) in wg.edges().iter().enumerate() {
            let fixed = inv.involution.edge_map[i] == i
                && inv.involution.node_map[we.a] == we.a
                && inv.involution.node_map[we.b] == we.b;
            assert_eq!(fixed, is_bridge[we.base_edge]);
        }
    }

    #[test]
    fn wdr_enumerations_match_known_classes() {
        let tree = corpus::path3();
        let out = wdr_enumerate(&tree, 1, 1, 1, WdrCaps::default()).unwrap();
        assert_eq!(out.classes, vec![vdiv(&[("p1", 1)])]);

        let theta = corpus::theta();
        let out = wdr_enumerate(&theta, 2, 1, 1, WdrCaps::default()).unwrap();
        assert_eq!(out.classes, vec![vdiv(&[("u", 1), ("v", 1)])]);
        assert_eq!(out.denominator, 1);
        assert!(out.complete_for_grid);

        // midpoint pairs 2[m] fall into the same class on the half grid
        let out = wdr_enumerate(&theta, 2, 1, 2, WdrCaps::default()).unwrap();
        assert_eq!(out.classes, vec![vdiv(&[("u", 1), ("v", 1)])]);

        let out = wdr_enumerate(&theta, 0, 0, 1, WdrCaps::default()).unwrap();
        assert_eq!(out.classes, vec![Divisor::zero()]);
    }

    #[test]
    fn wdr_candidate_cap_is_enforced() {
        let g = corpus::theta();
        let err = wdr_enumerate(&g, 3, 0, 4, WdrCaps { max_candidates: 10 }).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
    }
}
