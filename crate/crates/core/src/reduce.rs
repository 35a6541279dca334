//! Reduced divisors: Dhar's burning algorithm, the two-stage reduction, and
//! peel sequences certifying reducedness.

use std::collections::VecDeque;

use crate::divisor::{Divisor, FiringScript};
use crate::error::{Error, Result};
use crate::graph::Point;
use crate::working::WorkingGraph;

/// Outcome of one burning pass from the base node.
#[derive(Debug, Clone)]
pub struct BurnOutcome {
    /// Nodes reached by the fire, in ignition order.
    pub burnt_order: Vec<usize>,
    /// Nodes the fire never reached (empty iff the divisor is reduced).
    pub unburnt: Vec<usize>,
}

/// Result of reducing a divisor at a base point.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub base: Point,
    pub reduced: Divisor,
    /// Witness script: `reduced = input - div(witness)` on the working graph.
    pub witness: FiringScript,
}

/// Runs Dhar's burning algorithm on a node vector from the given base node.
/// A vertex ignites when its number of edges into the burnt region exceeds
/// its coefficient. The divisor must be effective away from the base.
pub fn dhar_burn_vec(wg: &WorkingGraph, d: &[i64], base: usize) -> Result<BurnOutcome> {
    for (node, &c) in d.iter().enumerate() {
        if c < 0 && node != base {
            return Err(Error::precondition(format!(
                "divisor has negative coefficient {c} at {} away from the base",
                wg.node_name(node)
            )));
        }
    }
    let n = wg.node_count();
    let mut burnt = vec![false; n];
    let mut hot_edges = vec![0i64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([base]);
    burnt[base] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(w, _) in wg.neighbors(u) {
            if burnt[w] {
                continue;
            }
            hot_edges[w] += 1;
            if hot_edges[w] > d[w] {
                burnt[w] = true;
                queue.push_back(w);
            }
        }
    }
    let unburnt = (0..n).filter(|&v| !burnt[v]).collect();
    Ok(BurnOutcome {
        burnt_order: order,
        unburnt,
    })
}

/// Dhar burning on a divisor.
pub fn dhar_burn(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<BurnOutcome> {
    let base_node = wg.node_of_point(base)?;
    let v = d.to_vec(wg)?;
    dhar_burn_vec(wg, &v, base_node)
}

/// True iff `d` is base-reduced: effective away from the base and burning
/// from the base consumes the whole graph.
pub fn is_reduced(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<bool> {
    let base_node = wg.node_of_point(base)?;
    let v = d.to_vec(wg)?;
    Ok(is_reduced_vec(wg, &v, base_node))
}

pub fn is_reduced_vec(wg: &WorkingGraph, d: &[i64], base: usize) -> bool {
    if d.iter()
        .enumerate()
        .any(|(node, &c)| c < 0 && node != base)
    {
        return false;
    }
    dhar_burn_vec(wg, d, base)
        .expect("effectivity checked")
        .unburnt
        .is_empty()
}

/// In-place two-stage reduction of a node vector at `base`, accumulating the
/// witness script. Stage 1 fires distance sublevel sets until the divisor is
/// effective away from the base; stage 2 iterates Dhar and fires the unburnt
/// set until everything burns.
pub fn reduce_vec(wg: &WorkingGraph, d: &mut [i64], base: usize, script: &mut [i64]) {
    let n = wg.node_count();
    debug_assert_eq!(d.len(), n);

    // BFS distance layers from the base.
    let mut layer = vec![usize::MAX; n];
    layer[base] = 0;
    let mut queue = VecDeque::from([base]);
    let mut max_layer = 0;
    while let Some(u) = queue.pop_front() {
        for &(w, _) in wg.neighbors(u) {
            if layer[w] == usize::MAX {
                layer[w] = layer[u] + 1;
                max_layer = max_layer.max(layer[w]);
                queue.push_back(w);
            }
        }
    }

    // Stage 1: for k from the outermost layer inward, fire the sublevel set
    // {layer < k} until every layer-k vertex is nonnegative. Only edges
    // between layers k-1 and k cross the boundary, so each firing strictly
    // increases every layer-k vertex and leaves layers > k untouched.
    for k in (1..=max_layer).rev() {
        loop {
            let mut t: i64 = 0;
            for v in 0..n {
                if layer[v] == k && d[v] < 0 {
                    let indeg = wg
                        .neighbors(v)
                        .iter()
                        .filter(|&&(w, _)| layer[w] == k - 1)
                        .count() as i64;
                    debug_assert!(indeg > 0);
                    t = t.max((-d[v] + indeg - 1) / indeg);
                }
            }
            if t == 0 {
                break;
            }
            for e in wg.edges() {
                let (a, b) = (e.a, e.b);
                let (inner, outer) = if layer[a] < layer[b] { (a, b) } else { (b, a) };
                if layer[inner] == k - 1 && layer[outer] == k {
                    d[inner] -= t;
                    d[outer] += t;
                }
            }
            for v in 0..n {
                if layer[v] < k {
                    script[v] -= t;
                }
            }
        }
    }

    // Stage 2: iterated Dhar. Fire the unburnt set once per round; every
    // unburnt vertex keeps a nonnegative coefficient because it did not
    // ignite.
    loop {
        let outcome = dhar_burn_vec(wg, d, base).expect("stage 1 made d effective off base");
        if outcome.unburnt.is_empty() {
            break;
        }
        let mut in_u = vec![false; n];
        for &v in &outcome.unburnt {
            in_u[v] = true;
        }
        for e in wg.edges() {
            match (in_u[e.a], in_u[e.b]) {
                (true, false) => {
                    d[e.a] -= 1;
                    d[e.b] += 1;
                }
                (false, true) => {
                    d[e.b] -= 1;
                    d[e.a] += 1;
                }
                _ => {}
            }
        }
        for &v in &outcome.unburnt {
            script[v] -= 1;
        }
    }
}

/// Reduces a divisor at a base point, returning the unique reduced
/// representative and an exact firing-script witness.
pub fn reduce(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<ReductionResult> {
    let base_node = wg.node_of_point(base)?;
    let mut v = d.to_vec(wg)?;
    let mut script = vec![0i64; wg.node_count()];
    reduce_vec(wg, &mut v, base_node, &mut script);
    let witness = FiringScript::from_values(wg, script)?.normalized_at(base_node);
    Ok(ReductionResult {
        base: base.clone(),
        reduced: Divisor::from_vec(wg, &v),
        witness,
    })
}

/// Outcome of a peel-sequence computation.
#[derive(Debug, Clone)]
pub enum PeelOutcome {
    /// The support admits a peel ordering (a_1, ..., a_k): for each i, a_i is
    /// a non-saturated boundary point of the complement of the component of
    /// the graph minus {a_i, ..., a_k} containing the base.
    Sequence(Vec<Point>),
    /// Certificate of non-reducedness: a compact set, away from the base,
    /// none of whose boundary points is non-saturated.
    Blocked {
        set: Vec<Point>,
        boundary: Vec<Point>,
    },
}

/// Computes a peel sequence for an effective divisor with no chips at the
/// base. The sequence exists iff the divisor is base-reduced, and then lists
/// exactly the support.
pub fn peel_sequence(wg: &WorkingGraph, d: &Divisor, base: &Point) -> Result<PeelOutcome> {
    let base_node = wg.node_of_point(base)?;
    let v = d.to_vec(wg)?;
    if v[base_node] != 0 {
        return Err(Error::precondition(format!(
            "peel sequences need a divisor with no chips at the base, found {}",
            v[base_node]
        )));
    }
    if v.iter().any(|&c| c < 0) {
        return Err(Error::precondition("peel sequences need an effective divisor"));
    }
    Ok(match peel_sequence_vec(wg, &v, base_node) {
        Ok(seq) => PeelOutcome::Sequence(seq.into_iter().map(|n| wg.point_of_node(n)).collect()),
        Err((set, boundary)) => PeelOutcome::Blocked {
            set: set.into_iter().map(|n| wg.point_of_node(n)).collect(),
            boundary: boundary.into_iter().map(|n| wg.point_of_node(n)).collect(),
        },
    })
}

/// Node-level peel construction. Returns the sequence, or on failure the
/// blocking set with its (fully saturated) boundary.
pub fn peel_sequence_vec(
    wg: &WorkingGraph,
    d: &[i64],
    base: usize,
) -> std::result::Result<Vec<usize>, (Vec<usize>, Vec<usize>)> {
    let n = wg.node_count();
    let mut remaining: Vec<usize> = (0..n).filter(|&v| d[v] > 0 && v != base).collect();
    let mut seq = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        // Component of the graph minus the remaining support that contains
        // the base.
        let mut blocked = vec![false; n];
        for &s in &remaining {
            blocked[s] = true;
        }
        let mut in_u = vec![false; n];
        in_u[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in wg.neighbors(u) {
                if !in_u[w] && !blocked[w] {
                    in_u[w] = true;
                    queue.push_back(w);
                }
            }
        }
        // Boundary candidates: support vertices with an edge into that
        // component; outdegree counts those edges.
        let mut pick = None;
        let mut boundary = Vec::new();
        for &s in &remaining {
            let outdeg = wg
                .neighbors(s)
                .iter()
                .filter(|&&(w, _)| in_u[w])
                .count() as i64;
            if outdeg > 0 {
                boundary.push(s);
                if d[s] < outdeg && pick.is_none() {
                    pick = Some(s);
                }
            }
        }
        match pick {
            Some(s) => {
                seq.push(s);
                remaining.retain(|&x| x != s);
            }
            None => {
                let set: Vec<usize> = (0..n).filter(|&v| !in_u[v]).collect();
                return Err((set, boundary));
            }
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::divisor::apply_script;
    use crate::rational::Rational;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn dv(entries: &[(&str, i64)]) -> Divisor {
        Divisor::from_entries(
            entries
                .iter()
                .map(|(id, c)| (Point::vertex(*id), *c)),
        )
    }

    /// On the subdivided banana(3), 3 chips at v1 survive burning from v2
    /// but 4 chips do not.
    #[test]
    fn dhar_on_banana3() {
        let g = corpus::banana(3);
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("v2");
        let out = dhar_burn(&wg, &dv(&[("v1", 3)]), &base).unwrap();
        assert!(out.unburnt.is_empty());
        assert!(is_reduced(&wg, &dv(&[("v1", 3)]), &base).unwrap());

        let out = dhar_burn(&wg, &dv(&[("v1", 4)]), &base).unwrap();
        let v1 = wg.node_of_point(&Point::vertex("v1")).unwrap();
        assert_eq!(out.unburnt, vec![v1]);
        assert!(!is_reduced(&wg, &dv(&[("v1", 4)]), &base).unwrap());
    }

    #[test]
    fn dhar_rejects_negative_chips_off_base() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let d = dv(&[("v", -1)]);
        assert!(dhar_burn(&wg, &d, &Point::vertex("u")).is_err());
        // ... but a negative base coefficient is fine
        let d = dv(&[("u", -2), ("v", 1)]);
        assert!(dhar_burn(&wg, &d, &Point::vertex("u")).is_ok());
    }

    #[test]
    fn reduce_is_idempotent_and_witnessed() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u");
        let d = dv(&[("v", 5), ("u", -2)]);
        let res = reduce(&wg, &d, &base).unwrap();
        assert!(is_reduced(&wg, &res.reduced, &base).unwrap());
        assert_eq!(res.reduced.degree(), d.degree());
        // witness is exact
        let applied = apply_script(&wg, &d, &res.witness).unwrap();
        assert_eq!(applied, res.reduced);
        // reducing again is the identity
        let again = reduce(&wg, &res.reduced, &base).unwrap();
        assert_eq!(again.reduced, res.reduced);
        assert!(again.witness.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn reduce_at_interior_base() {
        let g = corpus::theta();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::on_edge("e1", r("1/2"));
        let d = dv(&[("u", 1), ("v", 1)]);
        let res = reduce(&wg, &d, &base).unwrap();
        assert!(is_reduced(&wg, &res.reduced, &base).unwrap());
        assert_eq!(res.reduced.degree(), 2);
    }

    #[test]
    fn already_reduced_three_petal_center() {
        let g = corpus::three_petal();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("v0");
        let d = dv(&[("v0", 2)]);
        let res = reduce(&wg, &d, &base).unwrap();
        assert_eq!(res.reduced, d);
        assert!(is_reduced(&wg, &d, &base).unwrap());
    }

    #[test]
    fn stage1_handles_deep_negatives() {
        let g = corpus::ladder4();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u1");
        let d = dv(&[("v1", -7), ("z3", 4), ("w1", -1)]);
        let res = reduce(&wg, &d, &base).unwrap();
        assert!(res.reduced.is_effective_away_from(&base));
        assert_eq!(res.reduced.degree(), d.degree());
        assert!(is_reduced(&wg, &res.reduced, &base).unwrap());
        let applied = apply_script(&wg, &d, &res.witness).unwrap();
        assert_eq!(applied, res.reduced);
    }

    #[test]
    fn peel_sequence_lists_support_of_reduced_divisors() {
        let g = corpus::banana(3);
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("v2");
        let d = dv(&[("v1", 3)]);
        match peel_sequence(&wg, &d, &base).unwrap() {
            PeelOutcome::Sequence(seq) => assert_eq!(seq, vec![Point::vertex("v1")]),
            PeelOutcome::Blocked { .. } => panic!("3[v1] is v2-reduced"),
        }
        let d = dv(&[("v1", 4)]);
        match peel_sequence(&wg, &d, &base).unwrap() {
            PeelOutcome::Sequence(_) => panic!("4[v1] is not v2-reduced"),
            PeelOutcome::Blocked { set, boundary } => {
                assert!(set.contains(&Point::vertex("v1")));
                assert_eq!(boundary, vec![Point::vertex("v1")]);
            }
        }
    }

    #[test]
    fn peel_agrees_with_dhar_on_random_effective_divisors() {
        use rand::{Rng, SeedableRng};
        let g = corpus::ladder4();
        let wg = WorkingGraph::new(&g, &[1]).unwrap();
        let base = Point::vertex("u1");
        let base_node = wg.node_of_point(&base).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut d = Divisor::zero();
            for _ in 0..rng.gen_range(0..6) {
                let node = rng.gen_range(0..wg.node_count());
                if node == base_node {
                    continue;
                }
                d.add_coeff(wg.point_of_node(node), rng.gen_range(1..3));
            }
            let peel_ok = matches!(
                peel_sequence(&wg, &d, &base).unwrap(),
                PeelOutcome::Sequence(_)
            );
            let dhar_ok = is_reduced(&wg, &d, &base).unwrap();
            assert_eq!(peel_ok, dhar_ok, "peel and Dhar disagree on {d}");
        }
    }
}
