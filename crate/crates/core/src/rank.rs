//! Baker-Norine rank via the reduced-divisor recursion, linear equivalence
//! testing, and the Riemann-Roch identity check.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::divisor::{canonical_divisor, Divisor, FiringScript};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::rational::Rational;
use crate::reduce::reduce_vec;
use crate::working::WorkingGraph;

/// Rank computations on one working graph, with a memo table keyed on
/// reduced representatives. Queries take `&self`, so one engine can serve
/// concurrent callers; results are independent of interleaving because the
/// reduced representative of a class is unique.
pub struct RankEngine {
    wg: WorkingGraph,
    base: usize,
    memo: Mutex<HashMap<Vec<i64>, i64>>,
}

impl RankEngine {
    /// Engine on the working graph of `g` refined enough to carry points
    /// with the given denominators. Vertex weights are ignored: this is the
    /// rank of the underlying metric space. Use [`weighted`](Self::weighted)
    /// for the weighted rank.
    pub fn new(g: &MetricGraph, denominators: &[i64]) -> Result<Self> {
        Ok(Self::from_working(WorkingGraph::new(g, denominators)?))
    }

    /// Engine for the weighted rank: ranks live on the weightless graph
    /// obtained by attaching ω(v) unit loops at each vertex v.
    pub fn weighted(g: &MetricGraph, denominators: &[i64]) -> Result<Self> {
        Self::new(&g.virtual_weightless(), denominators)
    }

    pub fn with_refinement(g: &MetricGraph, refinement: i64) -> Result<Self> {
        Ok(Self::from_working(WorkingGraph::with_refinement(
            g, refinement,
        )?))
    }

    pub fn from_working(wg: WorkingGraph) -> Self {
        // Vertices are sorted by id, so index 0 is the global default base.
        let base = wg.base_vertex_node(0);
        RankEngine {
            wg,
            base,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn working(&self) -> &WorkingGraph {
        &self.wg
    }

    /// Node index of the fixed global base (the smallest vertex id).
    pub fn base_node(&self) -> usize {
        self.base
    }

    pub fn rank(&self, d: &Divisor) -> Result<i64> {
        Ok(self.rank_nodes(d.to_vec(&self.wg)?))
    }

    pub fn rank_vec(&self, d: &[i64]) -> i64 {
        self.rank_nodes(d.to_vec())
    }

    /// r(d) = -1 if the base-reduced form is negative at the base, else
    /// 1 + min over working vertices v of r(d - [v]).
    fn rank_nodes(&self, mut d: Vec<i64>) -> i64 {
        let deg: i64 = d.iter().sum();
        if deg < 0 {
            return -1;
        }
        let n = self.wg.node_count();
        let mut script = vec![0i64; n];
        reduce_vec(&self.wg, &mut d, self.base, &mut script);
        if d[self.base] < 0 {
            return -1;
        }
        // No chips to spare at the base: removing one there leaves a reduced
        // divisor that is negative at the base, so the minimum below is -1.
        if d[self.base] == 0 {
            return 0;
        }
        if let Some(&r) = self.memo.lock().expect("memo poisoned").get(&d) {
            return r;
        }
        let mut best = i64::MAX;
        for v in 0..n {
            let mut child = d.clone();
            child[v] -= 1;
            best = best.min(self.rank_nodes(child));
            if best == -1 {
                break;
            }
        }
        let r = best + 1;
        self.memo.lock().expect("memo poisoned").insert(d, r);
        r
    }

    /// Decides d1 ~ d2 by comparing base-reduced forms; on success the
    /// witness script s satisfies d2 = d1 - div(s).
    pub fn linearly_equivalent(&self, d1: &Divisor, d2: &Divisor) -> Result<Equivalence> {
        if d1.degree() != d2.degree() {
            return Ok(Equivalence {
                equivalent: false,
                witness: None,
            });
        }
        let n = self.wg.node_count();
        let mut v1 = d1.to_vec(&self.wg)?;
        let mut s1 = vec![0i64; n];
        reduce_vec(&self.wg, &mut v1, self.base, &mut s1);
        let mut v2 = d2.to_vec(&self.wg)?;
        let mut s2 = vec![0i64; n];
        reduce_vec(&self.wg, &mut v2, self.base, &mut s2);
        if v1 != v2 {
            return Ok(Equivalence {
                equivalent: false,
                witness: None,
            });
        }
        // d1 - div(s1) = d2 - div(s2), so d2 = d1 - div(s1 - s2).
        let diff: Vec<i64> = s1.iter().zip(&s2).map(|(a, b)| a - b).collect();
        let witness = FiringScript::from_values(&self.wg, diff)?.normalized_at(self.base);
        Ok(Equivalence {
            equivalent: true,
            witness: Some(witness),
        })
    }
}

/// Result of a linear-equivalence test.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub equivalent: bool,
    pub witness: Option<FiringScript>,
}

fn grid_denominators(divisors: &[&Divisor]) -> Vec<i64> {
    let mut dens = vec![1];
    for d in divisors {
        dens.extend(d.denominators());
    }
    dens
}

/// Rank of `d` on the underlying weightless metric graph.
pub fn rank(g: &MetricGraph, d: &Divisor) -> Result<i64> {
    d.validate(g)?;
    RankEngine::new(g, &grid_denominators(&[d]))?.rank(d)
}

/// Weighted rank: `d` is carried verbatim onto the loop-augmented graph and
/// ranked there.
pub fn rank_weighted(g: &MetricGraph, d: &Divisor) -> Result<i64> {
    d.validate(g)?;
    RankEngine::weighted(g, &grid_denominators(&[d]))?.rank(d)
}

pub fn linearly_equivalent(g: &MetricGraph, d1: &Divisor, d2: &Divisor) -> Result<Equivalence> {
    d1.validate(g)?;
    d2.validate(g)?;
    RankEngine::new(g, &grid_denominators(&[d1, d2]))?.linearly_equivalent(d1, d2)
}

/// Both sides of the Riemann-Roch identity
/// r(d) - r(K - d) = deg(d) + 1 - g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RrCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// Evaluates the Riemann-Roch identity for `d` on a weightless graph.
pub fn rr_check(g: &MetricGraph, d: &Divisor) -> Result<RrCheck> {
    if g.total_weight() > 0 {
        return Err(Error::precondition(
            "the Riemann-Roch check runs on weightless graphs",
        ));
    }
    d.validate(g)?;
    let k = canonical_divisor(g, false);
    let engine = RankEngine::new(g, &grid_denominators(&[d]))?;
    let lhs = engine.rank(d)? - engine.rank(&k.sub(d))?;
    let rhs = d.degree() + 1 - g.genus().unweighted;
    Ok(RrCheck {
        lhs,
        rhs,
        equal: lhs == rhs,
    })
}

/// Scales every edge length by the positive factor `c`; ranks are invariant
/// under this homothety.
pub fn scale_lengths(g: &MetricGraph, c: Rational) -> Result<MetricGraph> {
    if !c.is_positive() {
        return Err(Error::invalid_input("length scale factor must be positive"));
    }
    MetricGraph::new(
        g.vertices().iter().map(|v| (v.id.clone(), v.weight)).collect(),
        g.edges()
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    g.vertex_id(e.tail).to_string(),
                    g.vertex_id(e.head).to_string(),
                    e.length * c,
                )
            })
            .collect(),
    )
}
