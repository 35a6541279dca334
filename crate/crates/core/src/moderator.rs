//! Moderators from acyclic orientations, the dominating-moderator
//! construction, and one-chip extension of reduced divisors.

use std::collections::VecDeque;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::Point;
use crate::reduce::{is_reduced_vec, peel_sequence_vec};
use crate::working::WorkingGraph;

/// A total order on the working-graph vertices. It induces the acyclic
/// orientation in which every edge points from its later endpoint to its
/// earlier one.
#[derive(Debug, Clone)]
pub struct AcyclicOrder {
    /// order[i] = the node placed at position i.
    order: Vec<usize>,
    /// pos[node] = its position in the order.
    pos: Vec<usize>,
}

impl AcyclicOrder {
    pub fn new(wg: &WorkingGraph, order: Vec<usize>) -> Result<Self> {
        let n = wg.node_count();
        if order.len() != n {
            return Err(Error::invalid_input(format!(
                "order lists {} nodes, the working graph has {n}",
                order.len()
            )));
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(Error::invalid_input(
                    "order must be a permutation of the working-graph nodes",
                ));
            }
            pos[v] = i;
        }
        Ok(AcyclicOrder { order, pos })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, node: usize) -> usize {
        self.pos[node]
    }

    /// Number of edges from `node` to earlier nodes (its out-valence under
    /// the induced orientation).
    pub fn out_valence(&self, wg: &WorkingGraph, node: usize) -> usize {
        wg.neighbors(node)
            .iter()
            .filter(|&&(w, _)| self.pos[w] < self.pos[node])
            .count()
    }

    /// Independently certifies that the induced orientation is acyclic by
    /// running a topological sort over the oriented edges.
    pub fn orientation_is_acyclic(&self, wg: &WorkingGraph) -> bool {
        let n = wg.node_count();
        let mut indeg = vec![0usize; n];
        for e in wg.edges() {
            let head = if self.pos[e.a] < self.pos[e.b] { e.a } else { e.b };
            indeg[head] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &(w, _) in wg.neighbors(u) {
                if self.pos[w] < self.pos[u] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        queue.push_back(w);
                    }
                }
            }
        }
        seen == n
    }
}

/// The divisor of an acyclic orientation: K(v) = (edges from v to earlier
/// vertices) - 1, of total degree g - 1.
#[derive(Debug, Clone)]
pub struct Moderator {
    pub order: AcyclicOrder,
    k: Vec<i64>,
}

impl Moderator {
    pub fn k_vec(&self) -> &[i64] {
        &self.k
    }

    pub fn divisor(&self, wg: &WorkingGraph) -> Divisor {
        Divisor::from_vec(wg, &self.k)
    }
}

/// Builds the moderator of a total order.
pub fn moderator_from_order(wg: &WorkingGraph, order: AcyclicOrder) -> Moderator {
    let k: Vec<i64> = (0..wg.node_count())
        .map(|v| order.out_valence(wg, v) as i64 - 1)
        .collect();
    Moderator { order, k }
}

/// Component of `base` in the graph minus the `removed` nodes.
fn component_of_base(wg: &WorkingGraph, base: usize, removed: &[bool]) -> Vec<bool> {
    let n = wg.node_count();
    let mut seen = vec![false; n];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        for &(w, _) in wg.neighbors(u) {
            if !seen[w] && !removed[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Appends, in BFS discovery order from `base` inside the `allowed` region,
/// every node of valence >= 2 that is neither placed yet nor excluded.
fn place_region_nodes(
    wg: &WorkingGraph,
    base: usize,
    allowed: &[bool],
    excluded: &[bool],
    placed: &mut [bool],
    order: &mut Vec<usize>,
) {
    let n = wg.node_count();
    let mut seen = vec![false; n];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        if wg.valence(u) >= 2 && !placed[u] && !excluded[u] {
            placed[u] = true;
            order.push(u);
        }
        for &(w, _) in wg.neighbors(u) {
            if !seen[w] && allowed[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
}

/// Node-level dominating moderator. `d` must be base-reduced with a negative
/// base coefficient. Returns a moderator K with d <= K pointwise,
/// K(base) = -1, and K base-reduced.
pub fn dominating_moderator_vec(
    wg: &WorkingGraph,
    d: &[i64],
    base: usize,
) -> Result<Moderator> {
    if d[base] >= 0 {
        return Err(Error::precondition(format!(
            "dominating moderator needs a negative base coefficient, found {}",
            d[base]
        )));
    }
    if !is_reduced_vec(wg, d, base) {
        return Err(Error::precondition(
            "dominating moderator input must be base-reduced",
        ));
    }
    let n = wg.node_count();
    // Forget the base coefficient; peel the rest of the support.
    let mut support_d = d.to_vec();
    support_d[base] = 0;
    let peel = match peel_sequence_vec(wg, &support_d, base) {
        Ok(seq) => seq,
        Err(_) => {
            return Err(Error::internal(
                "reduced divisor without a peel sequence",
            ))
        }
    };

    let mut placed = vec![false; n];
    let mut in_support = vec![false; n];
    for &a in &peel {
        in_support[a] = true;
    }
    let mut order = Vec::with_capacity(n);
    placed[base] = true;
    order.push(base);

    // Round i: place the non-support vertices of valence >= 2 living in the
    // component of the base once a_i..a_k are deleted, then a_i itself.
    // Every placed vertex acquires a neighbor earlier in the order, which is
    // what makes the final moderator base-reduced.
    let mut removed = vec![false; n];
    for &a in &peel {
        removed[a] = true;
    }
    for &a in &peel {
        let region = component_of_base(wg, base, &removed);
        place_region_nodes(wg, base, &region, &in_support, &mut placed, &mut order);
        placed[a] = true;
        order.push(a);
        removed[a] = false;
    }
    // Final round: the whole graph.
    let region = vec![true; n];
    place_region_nodes(wg, base, &region, &in_support, &mut placed, &mut order);
    // Valence-1 vertices close the order, smallest first.
    for v in 0..n {
        if !placed[v] {
            debug_assert!(wg.valence(v) <= 1);
            placed[v] = true;
            order.push(v);
        }
    }

    let moderator = moderator_from_order(wg, AcyclicOrder::new(wg, order)?);
    let k = moderator.k_vec();
    if k[base] != -1 || (0..n).any(|v| d[v] > k[v]) || !is_reduced_vec(wg, k, base) {
        return Err(Error::internal("dominating moderator postcondition failed"));
    }
    Ok(moderator)
}

/// Dominating moderator for a divisor at a base point.
pub fn dominating_moderator(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<Moderator> {
    let base_node = wg.node_of_point(base)?;
    let v = d.to_vec(wg)?;
    dominating_moderator_vec(wg, &v, base_node)
}

/// Node-level one-chip extension: for base-reduced `d` with
/// deg(d) - d(base) <= g - 1, returns a node w (never the base) such that
/// d + [w] is still base-reduced.
pub fn extend_reduced_vec(wg: &WorkingGraph, d: &[i64], base: usize) -> Result<usize> {
    if !is_reduced_vec(wg, d, base) {
        return Err(Error::precondition("extension input must be base-reduced"));
    }
    let deg: i64 = d.iter().sum();
    let g = wg.genus();
    if deg - d[base] > g - 1 {
        return Err(Error::precondition(format!(
            "extension needs deg(d) - d(base) <= g - 1; got {} > {}",
            deg - d[base],
            g - 1
        )));
    }
    // Lower the base coefficient to -1 and dominate what is left.
    let mut dd = d.to_vec();
    dd[base] = -1;
    let moderator = dominating_moderator_vec(wg, &dd, base)?;
    let k = moderator.k_vec();
    let w = (0..wg.node_count())
        .find(|&v| dd[v] < k[v])
        .ok_or_else(|| Error::internal("no strict slack under the dominating moderator"))?;
    debug_assert_ne!(w, base);
    let mut extended = d.to_vec();
    extended[w] += 1;
    if !is_reduced_vec(wg, &extended, base) {
        return Err(Error::internal("extension is not base-reduced"));
    }
    Ok(w)
}

/// One-chip extension of a base-reduced divisor; returns the point where
/// the chip lands.
pub fn extend_reduced(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<Point> {
    let base_node = wg.node_of_point(base)?;
    let v = d.to_vec(wg)?;
    Ok(wg.point_of_node(extend_reduced_vec(wg, &v, base_node)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::MetricGraph;
    use crate::rank::RankEngine;
    use crate::rational::Rational;
    use crate::reduce::reduce_vec;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn path_moderator_has_degree_minus_one() {
        let g = corpus::path3();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        // BFS order from p1
        let base = wg.node_of_point(&Point::vertex("p1")).unwrap();
        let mut order: Vec<usize> = Vec::new();
        let mut seen = vec![false; wg.node_count()];
        let mut queue = std::collections::VecDeque::from([base]);
        seen[base] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(w, _) in wg.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let m = moderator_from_order(&wg, AcyclicOrder::new(&wg, order).unwrap());
        let k = m.divisor(&wg);
        assert_eq!(k.degree(), -1);
        assert_eq!(k.coeff(&Point::vertex("p1")), -1);
        assert!(m.order.orientation_is_acyclic(&wg));
    }

    #[test]
    fn moderator_degree_is_genus_minus_one_for_any_order() {
        for (name, g) in [("theta", corpus::theta()), ("banana3", corpus::banana(3))] {
            let wg = WorkingGraph::new(&g, &[1]).unwrap();
            let identity = AcyclicOrder::new(&wg, (0..wg.node_count()).collect()).unwrap();
            let m = moderator_from_order(&wg, identity);
            assert_eq!(
                m.divisor(&wg).degree(),
                wg.genus() - 1,
                "graph {name}"
            );
        }
    }

    #[test]
    fn dominating_moderator_on_theta() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u");
        let d = Divisor::from_entries([(base.clone(), -1)]);
        let m = dominating_moderator(&wg, &d, &base).unwrap();
        let k = m.divisor(&wg);
        assert_eq!(k.degree(), wg.genus() - 1);
        assert_eq!(k.coeff(&base), -1);
        assert!(crate::reduce::is_reduced(&wg, &k, &base).unwrap());
    }

    #[test]
    fn dominating_moderator_on_three_petal() {
        let g = corpus::three_petal();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("v0");
        // one chip at a far petal vertex, forced base debt
        let d = Divisor::from_entries([(base.clone(), -1), (Point::vertex("v2"), 1)]);
        let m = dominating_moderator(&wg, &d, &base).unwrap();
        let k = m.divisor(&wg);
        assert_eq!(k.degree(), 2);
        assert_eq!(k.coeff(&base), -1);
        assert!(k.coeff(&Point::vertex("v2")) >= 1);
        assert!(m.order.orientation_is_acyclic(&wg));
    }

    #[test]
    fn dominating_moderator_rejects_bad_inputs() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u");
        // nonnegative at the base
        let d = Divisor::from_entries([(Point::vertex("v"), 1)]);
        assert!(dominating_moderator(&wg, &d, &base).is_err());
        // not reduced: 4 chips on one banana hub
        let g = corpus::banana(3);
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("v2");
        let d = Divisor::from_entries([(base.clone(), -1), (Point::vertex("v1"), 4)]);
        assert!(dominating_moderator(&wg, &d, &base).is_err());
    }

    #[test]
    fn random_dominating_moderators_satisfy_all_postconditions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (_, g) in [
            ("theta", corpus::theta()),
            ("three-petal", corpus::three_petal()),
            ("ladder4", corpus::ladder4()),
        ] {
            let wg = WorkingGraph::new(&g, &[1]).unwrap();
            let n = wg.node_count();
            for _ in 0..40 {
                let base = rng.gen_range(0..n);
                // random effective chips, reduced, then a forced base debt
                let mut d = vec![0i64; n];
                for _ in 0..rng.gen_range(0..wg.genus() + 2) {
                    d[rng.gen_range(0..n)] += 1;
                }
                let mut script = vec![0i64; n];
                reduce_vec(&wg, &mut d, base, &mut script);
                d[base] = -1 - rng.gen_range(0..2);
                let m = dominating_moderator_vec(&wg, &d, base).unwrap();
                let k = m.k_vec();
                assert_eq!(k.iter().sum::<i64>(), wg.genus() - 1);
                assert_eq!(k[base], -1);
                assert!((0..n).all(|v| d[v] <= k[v]));
                assert!(is_reduced_vec(&wg, k, base));
                assert!(m.order.orientation_is_acyclic(&wg));
            }
        }
    }

    #[test]
    fn extension_respects_the_degree_bound() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u");
        let w = extend_reduced(&wg, &Divisor::zero(), &base).unwrap();
        assert_ne!(w, base);
        let d = Divisor::from_entries([(w, 1)]);
        assert!(crate::reduce::is_reduced(&wg, &d, &base).unwrap());
        // bound g - 1 = 1 exhausted at off-base degree 2
        let d2 = Divisor::from_entries([(Point::vertex("v"), 2)]);
        assert!(extend_reduced(&wg, &d2, &base).is_err());
    }

    #[test]
    fn iterated_extension_reaches_degree_g_with_rank_zero() {
        let g = corpus::three_petal();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base_node = wg.node_of_point(&Point::vertex("v0")).unwrap();
        let genus = wg.genus();
        let mut d = vec![0i64; wg.node_count()];
        for _ in 0..genus {
            let w = extend_reduced_vec(&wg, &d, base_node).unwrap();
            d[w] += 1;
            assert!(is_reduced_vec(&wg, &d, base_node));
        }
        assert_eq!(d.iter().sum::<i64>(), genus);
        let engine = RankEngine::new(&g, &[1]).unwrap();
        assert_eq!(engine.rank_vec(&d), 0);
        // the bound is now exhausted
        assert!(extend_reduced_vec(&wg, &d, base_node).is_err());
    }

    #[test]
    fn extension_works_from_interior_bases() {
        let g = MetricGraph::new(
            vec![("u".into(), 0), ("v".into(), 0)],
            vec![
                ("e1".into(), "u".into(), "v".into(), r("1")),
                ("e2".into(), "u".into(), "v".into(), r("2")),
            ],
        )
        .unwrap();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::on_edge("e2", r("1/2"));
        let w = extend_reduced(&wg, &Divisor::zero(), &base).unwrap();
        let d = Divisor::from_entries([(w, 1)]);
        assert!(crate::reduce::is_reduced(&wg, &d, &base).unwrap());
    }
}
