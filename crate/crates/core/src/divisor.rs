//! Divisors: finite formal integer sums of points, and firing scripts.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Point};
use crate::working::WorkingGraph;

/// A divisor. Zero coefficients are never stored, so equality of the entry
/// maps is equality of divisors. The divisor is plain data; operations that
/// need a graph validate the support against it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    entries: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Point, i64)>) -> Self {
        let mut d = Divisor::zero();
        for (p, c) in entries {
            d.add_coeff(p, c);
        }
        d
    }

    pub fn single(p: Point, coeff: i64) -> Self {
        Divisor::from_entries([(p, coeff)])
    }

    pub fn coeff(&self, p: &Point) -> i64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn add_coeff(&mut self, p: Point, c: i64) {
        if c == 0 {
            return;
        }
        match self.entries.get_mut(&p) {
            Some(v) => {
                *v += c;
                if *v == 0 {
                    self.entries.remove(&p);
                }
            }
            None => {
                self.entries.insert(p, c);
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.entries.iter().map(|(p, &c)| (p, c))
    }

    pub fn degree(&self) -> i64 {
        self.entries.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.entries.keys()
    }

    pub fn is_effective(&self) -> bool {
        self.entries.values().all(|&c| c >= 0)
    }

    /// Effective away from the given point (its own coefficient is free).
    pub fn is_effective_away_from(&self, p: &Point) -> bool {
        self.entries.iter().all(|(q, &c)| c >= 0 || q == p)
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, c) in other.entries() {
            out.add_coeff(p.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            entries: self.entries.iter().map(|(p, &c)| (p.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Divisor {
        if k == 0 {
            return Divisor::zero();
        }
        Divisor {
            entries: self.entries.iter().map(|(p, &c)| (p.clone(), c * k)).collect(),
        }
    }

    /// Validates that every support point lies on the graph.
    pub fn validate(&self, g: &MetricGraph) -> Result<()> {
        for p in self.support() {
            g.validate_point(p)?;
        }
        Ok(())
    }

    /// Pushes the divisor forward along a retraction.
    pub fn pushforward(&self, map: &crate::graph::PointMap) -> Divisor {
        let mut out = Divisor::zero();
        for (p, c) in self.entries() {
            out.add_coeff(map.map_point(p), c);
        }
        out
    }

    /// Denominators needed to place the support on a working grid.
    pub fn denominators(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self
            .entries
            .keys()
            .filter_map(|p| match p {
                Point::Vertex(_) => None,
                Point::OnEdge { offset, .. } => Some(offset.denom()),
            })
            .collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Node-indexed coefficient vector on a working graph. Errors when the
    /// support misses the grid.
    pub fn to_vec(&self, wg: &WorkingGraph) -> Result<Vec<i64>> {
        let mut v = vec![0i64; wg.node_count()];
        for (p, c) in self.entries() {
            let node = wg.node_of_point(p)?;
            v[node] += c;
        }
        Ok(v)
    }

    /// Rebuilds a divisor from a node-indexed vector.
    pub fn from_vec(wg: &WorkingGraph, v: &[i64]) -> Divisor {
        let mut d = Divisor::zero();
        for (node, &c) in v.iter().enumerate() {
            if c != 0 {
                d.add_coeff(wg.point_of_node(node), c);
            }
        }
        d
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.entries {
            if first {
                write!(f, "{c}[{p}]")?;
                first = false;
            } else if *c < 0 {
                write!(f, " - {}[{p}]", -c)?;
            } else {
                write!(f, " + {c}[{p}]")?;
            }
        }
        Ok(())
    }
}

/// An integer-valued function on the working vertices, linear on each unit
/// segment. Its divisor is `div(f)(v) = sum over edges vw of f(w) - f(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringScript {
    values: Vec<i64>,
}

impl FiringScript {
    pub fn zero(wg: &WorkingGraph) -> Self {
        FiringScript {
            values: vec![0; wg.node_count()],
        }
    }

    pub fn from_values(wg: &WorkingGraph, values: Vec<i64>) -> Result<Self> {
        if values.len() != wg.node_count() {
            return Err(Error::invalid_input(format!(
                "script has {} values but the working graph has {} vertices",
                values.len(),
                wg.node_count()
            )));
        }
        Ok(FiringScript { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> i64 {
        self.values[node]
    }

    pub fn add_on(&mut self, nodes: impl IntoIterator<Item = usize>, delta: i64) {
        for n in nodes {
            self.values[n] += delta;
        }
    }

    pub fn sub(&self, other: &FiringScript) -> FiringScript {
        FiringScript {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Normalizes the script to vanish at the given node; the divisor of a
    /// script is invariant under adding constants.
    pub fn normalized_at(&self, node: usize) -> FiringScript {
        let c = self.values[node];
        FiringScript {
            values: self.values.iter().map(|v| v - c).collect(),
        }
    }

    /// The principal divisor of the script, as a node vector.
    pub fn divisor_vec(&self, wg: &WorkingGraph) -> Vec<i64> {
        let mut out = vec![0i64; wg.node_count()];
        for e in wg.edges() {
            let slope = self.values[e.b] - self.values[e.a];
            out[e.a] += slope;
            out[e.b] -= slope;
        }
        out
    }

    /// The principal divisor of the script.
    pub fn divisor(&self, wg: &WorkingGraph) -> Divisor {
        Divisor::from_vec(wg, &self.divisor_vec(wg))
    }
}

/// Applies a firing script to a divisor: `d - div(script)`. The divisor's
/// support must lie on the working grid.
pub fn apply_script(wg: &WorkingGraph, d: &Divisor, script: &FiringScript) -> Result<Divisor> {
    if script.values.len() != wg.node_count() {
        return Err(Error::invalid_input(
            "script is bound to a different working graph",
        ));
    }
    let mut v = d.to_vec(wg)?;
    let dv = script.divisor_vec(wg);
    for (a, b) in v.iter_mut().zip(dv) {
        *a -= b;
    }
    Ok(Divisor::from_vec(wg, &v))
}

/// The canonical divisor. For a weightless graph this is
/// sum (valence(v) - 2)[v]; with `weighted` it is the canonical divisor of
/// the virtual weightless graph, sum (valence(v) + 2 weight(v) - 2)[v],
/// expressed on the graph itself. Interior points have valence 2 and never
/// contribute, so computing over the model's vertices is exact.
pub fn canonical_divisor(g: &MetricGraph, weighted: bool) -> Divisor {
    let mut d = Divisor::zero();
    for (vi, v) in g.vertices().iter().enumerate() {
        let mut c = g.valence(vi) as i64 - 2;
        if weighted {
            c += 2 * v.weight as i64;
        }
        d.add_coeff(Point::Vertex(v.id.clone()), c);
    }
    d
}
