//! Order-two automorphisms of working graphs and their quotient genus.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::working::WorkingGraph;

/// An automorphism of order at most two: a node permutation together with a
/// compatible permutation of the edges (needed because parallel edges can be
/// matched in more than one way).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInvolution {
    pub node_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl GraphInvolution {
    pub fn fixed_nodes(&self) -> Vec<usize> {
        (0..self.node_map.len())
            .filter(|&v| self.node_map[v] == v)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.node_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge_map.iter().enumerate().all(|(i, &e)| i == e)
    }
}

/// Checks the involution axioms: both maps are self-inverse permutations and
/// every edge is carried onto an edge with the mapped endpoints.
pub fn validate_involution(wg: &WorkingGraph, inv: &GraphInvolution) -> Result<()> {
    let n = wg.node_count();
    let m = wg.edge_count();
    if inv.node_map.len() != n || inv.edge_map.len() != m {
        return Err(Error::invalid_input("involution map sizes do not match the graph"));
    }
    for v in 0..n {
        let w = inv.node_map[v];
        if w >= n || inv.node_map[w] != v {
            return Err(Error::invalid_input(format!(
                "node map is not an order-two permutation at node {v}"
            )));
        }
    }
    for i in 0..m {
        let j = inv.edge_map[i];
        if j >= m || inv.edge_map[j] != i {
            return Err(Error::invalid_input(format!(
                "edge map is not an order-two permutation at edge {i}"
            )));
        }
        let e = &wg.edges()[i];
        let f = &wg.edges()[j];
        let want = (
            inv.node_map[e.a].min(inv.node_map[e.b]),
            inv.node_map[e.a].max(inv.node_map[e.b]),
        );
        if (f.a.min(f.b), f.a.max(f.b)) != want {
            return Err(Error::invalid_input(format!(
                "edge {i} is not carried onto an edge with the mapped endpoints"
            )));
        }
    }
    Ok(())
}

/// Genus of the topological quotient. Node orbits collapse to one vertex
/// each; an edge fixed with its endpoints swapped folds onto a half-edge,
/// adding a midpoint vertex; edge orbits collapse to one edge each.
pub fn quotient_genus(wg: &WorkingGraph, inv: &GraphInvolution) -> i64 {
    let mut vertices = 0i64;
    for v in 0..wg.node_count() {
        if inv.node_map[v] >= v {
            vertices += 1;
        }
    }
    let mut edges = 0i64;
    for (i, e) in wg.edges().iter().enumerate() {
        match inv.edge_map[i].cmp(&i) {
            std::cmp::Ordering::Equal => {
                edges += 1;
                if inv.node_map[e.a] == e.b && e.a != e.b {
                    // fixed reversed: the fold point becomes a new vertex
                    vertices += 1;
                }
            }
            std::cmp::Ordering::Greater => edges += 1,
            std::cmp::Ordering::Less => {}
        }
    }
    edges - vertices + 1
}

/// Multiplicity table: for each node, how many edges join it to each
/// neighbor, plus a local signature (sorted parallel counts and sorted
/// neighbor valences) used to prune the search.
struct Multiplicities {
    table: Vec<BTreeMap<usize, usize>>,
    signature: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Multiplicities {
    fn new(wg: &WorkingGraph) -> Self {
        let n = wg.node_count();
        let mut table: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for e in wg.edges() {
            *table[e.a].entry(e.b).or_insert(0) += 1;
            *table[e.b].entry(e.a).or_insert(0) += 1;
        }
        let valence: Vec<usize> = (0..n).map(|v| wg.valence(v)).collect();
        let signature = table
            .iter()
            .map(|row| {
                let counts = row.values().copied().sorted().collect();
                let around = row
                    .iter()
                    .flat_map(|(&nbr, &cnt)| std::iter::repeat(valence[nbr]).take(cnt))
                    .sorted()
                    .collect();
                (counts, around)
            })
            .collect();
        Multiplicities { table, signature }
    }

    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a].get(&b).copied().unwrap_or(0)
    }

    /// Unassigned node with the most already-assigned incident edges, ties
    /// to the smallest index. Keeps the backtracking anchored to the part of
    /// the graph that already constrains it.
    fn pick_next(&self, sigma: &[Option<usize>]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for u in 0..sigma.len() {
            if sigma[u].is_some() {
                continue;
            }
            let anchored: usize = self.table[u]
                .iter()
                .filter(|(&nbr, _)| sigma[nbr].is_some())
                .map(|(_, &cnt)| cnt)
                .sum();
            if best.map_or(true, |(score, _)| anchored > score) {
                best = Some((anchored, u));
            }
        }
        best.map(|(_, u)| u)
    }
}

const MATCHING_CAP: usize = 1 << 16;

/// Enumerates every automorphism of order at most two (the identity
/// included), as (node permutation, edge matching) pairs, in a fixed
/// deterministic order.
pub fn involutive_automorphisms(wg: &WorkingGraph) -> Result<Vec<GraphInvolution>> {
    let n = wg.node_count();
    let mult = Multiplicities::new(wg);
    let mut sigma: Vec<Option<usize>> = vec![None; n];
    let mut node_maps: Vec<Vec<usize>> = Vec::new();
    search_node_maps(wg, &mult, &mut sigma, &mut node_maps)?;

    let mut out = Vec::new();
    for node_map in node_maps {
        extend_edge_matchings(wg, &node_map, &mut out)?;
    }
    Ok(out)
}

fn search_node_maps(
    wg: &WorkingGraph,
    mult: &Multiplicities,
    sigma: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let n = wg.node_count();
    let u = match mult.pick_next(sigma) {
        Some(u) => u,
        None => {
            out.push(sigma.iter().map(|s| s.unwrap()).collect());
            if out.len() > MATCHING_CAP {
                return Err(Error::resource_cap(
                    "too many candidate automorphisms on the working graph",
                ));
            }
            return Ok(());
        }
    };
    for v in 0..n {
        if v != u && sigma[v].is_some() {
            continue;
        }
        if mult.signature[u] != mult.signature[v] {
            continue;
        }
        // pairing u <-> v must preserve multiplicities against everything
        // already assigned
        let ok = (0..n).all(|x| match sigma[x] {
            Some(sx) => mult.get(u, x) == mult.get(v, sx) && mult.get(v, x) == mult.get(u, sx),
            None => true,
        }) && mult.get(u, v) == mult.get(v, u);
        if !ok {
            continue;
        }
        sigma[u] = Some(v);
        sigma[v] = Some(u);
        search_node_maps(wg, mult, sigma, out)?;
        sigma[u] = None;
        if v != u {
            sigma[v] = None;
        }
    }
    Ok(())
}

/// Parallel class: the list of edge indices joining one unordered node pair.
fn parallel_classes(wg: &WorkingGraph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, e) in wg.edges().iter().enumerate() {
        classes.entry((e.a.min(e.b), e.a.max(e.b))).or_default().push(i);
    }
    classes
}

/// For one node permutation, enumerates the compatible involutive edge
/// matchings: classes mapped to themselves get involutive permutations,
/// classes swapped in pairs get arbitrary bijections (the way back is
/// forced).
fn extend_edge_matchings(
    wg: &WorkingGraph,
    node_map: &[usize],
    out: &mut Vec<GraphInvolution>,
) -> Result<()> {
    let classes = parallel_classes(wg);
    let m = wg.edge_count();

    // per-class choices: list of partial assignments (pairs edge -> edge)
    let mut choice_sets: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    for (&(a, b), members) in &classes {
        let (ia, ib) = (node_map[a], node_map[b]);
        let image_key = (ia.min(ib), ia.max(ib));
        let image = classes
            .get(&image_key)
            .expect("node map preserves multiplicities");
        debug_assert_eq!(members.len(), image.len());
        if image_key < (a, b) {
            continue; // handled when the image class was visited
        }
        let mut choices = Vec::new();
        if image_key == (a, b) {
            // involutive permutations of the class
            let k = members.len();
            for perm in (0..k).permutations(k) {
                if (0..k).all(|i| perm[perm[i]] == i) {
                    choices.push(
                        (0..k)
                            .map(|i| (members[i], members[perm[i]]))
                            .collect::<Vec<_>>(),
                    );
                }
            }
        } else {
            // bijections onto the image class; the inverse direction is
            // recorded at the same time
            let k = members.len();
            for perm in (0..k).permutations(k) {
                let mut assign = Vec::with_capacity(2 * k);
                for i in 0..k {
                    assign.push((members[i], image[perm[i]]));
                    assign.push((image[perm[i]], members[i]));
                }
                choices.push(assign);
            }
        }
        choice_sets.push(choices);
    }

    let total: usize = choice_sets
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .unwrap_or(usize::MAX);
    if total > MATCHING_CAP {
        return Err(Error::resource_cap(
            "too many parallel-edge matchings on the working graph",
        ));
    }

    let mut edge_map = vec![usize::MAX; m];
    fill_matchings(node_map, &choice_sets, 0, &mut edge_map, out);
    Ok(())
}

fn fill_matchings(
    node_map: &[usize],
    choice_sets: &[Vec<Vec<(usize, usize)>>],
    depth: usize,
    edge_map: &mut Vec<usize>,
    out: &mut Vec<GraphInvolution>,
) {
    if depth == choice_sets.len() {
        out.push(GraphInvolution {
            node_map: node_map.to_vec(),
            edge_map: edge_map.clone(),
        });
        return;
    }
    for choice in &choice_sets[depth] {
        for &(from, to) in choice {
            edge_map[from] = to;
        }
        fill_matchings(node_map, choice_sets, depth + 1, edge_map, out);
    }
}

/// Involutions whose quotient is a tree.
pub fn tree_quotient_involutions(wg: &WorkingGraph) -> Result<Vec<GraphInvolution>> {
    let mut out = Vec::new();
    for inv in involutive_automorphisms(wg)? {
        debug_assert!(validate_involution(wg, &inv).is_ok());
        if quotient_genus(wg, &inv) == 0 {
            out.push(inv);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::Point;

    #[test]
    fn identity_quotient_has_full_genus() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let id = GraphInvolution {
            node_map: (0..wg.node_count()).collect(),
            edge_map: (0..wg.edge_count()).collect(),
        };
        validate_involution(&wg, &id).unwrap();
        assert_eq!(quotient_genus(&wg, &id), wg.genus());
    }

    #[test]
    fn theta_has_a_unique_tree_quotient_involution() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let found = tree_quotient_involutions(&wg).unwrap();
        assert_eq!(found.len(), 1);
        let inv = &found[0];
        let u = wg.node_of_point(&Point::vertex("u")).unwrap();
        let v = wg.node_of_point(&Point::vertex("v")).unwrap();
        assert_eq!(inv.node_map[u], v);
        // the three midpoints stay put
        assert_eq!(inv.fixed_nodes().len(), 3);
    }

    #[test]
    fn banana_involution_swaps_the_hubs() {
        for genus in 2..=4 {
            let g = corpus::banana(genus);
            let wg = WorkingGraph::new(&g, &[1]).unwrap();
            let found = tree_quotient_involutions(&wg).unwrap();
            assert_eq!(found.len(), 1, "banana({genus})");
            let inv = &found[0];
            let v1 = wg.node_of_point(&Point::vertex("v1")).unwrap();
            let v2 = wg.node_of_point(&Point::vertex("v2")).unwrap();
            assert_eq!(inv.node_map[v1], v2);
            // every edge midpoint is fixed
            assert_eq!(inv.fixed_nodes().len(), genus as usize + 1);
        }
    }

    #[test]
    fn k4_has_no_tree_quotient_involution() {
        let g = corpus::k4();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        assert!(tree_quotient_involutions(&wg).unwrap().is_empty());
    }

    #[test]
    fn parallel_pair_matchings_are_distinguished() {
        // one weighted vertex: two virtual loops become two parallel pairs
        let g = corpus::weighted_vertex(2).virtual_weightless();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let found = tree_quotient_involutions(&wg).unwrap();
        assert_eq!(found.len(), 1);
        let inv = &found[0];
        // all three nodes fixed, both parallel classes swapped
        assert_eq!(inv.fixed_nodes().len(), 3);
        assert!(inv.edge_map.iter().enumerate().all(|(i, &j)| i != j));
        assert_eq!(quotient_genus(&wg, inv), 0);
    }
}
