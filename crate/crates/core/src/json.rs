//! Wire formats. Graphs, points and divisors have stable JSON shapes; the
//! result documents mirror each operation's output. All rationals travel as
//! decimal-free strings, and every map is ordered, so serialization is
//! deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, FiringScript};
use crate::error::Result;
use crate::graph::{ConditionIVerdict, Genus, MetricGraph, Point};
use crate::hyperelliptic::{HyperellipticCert, InvolutionCert, Refutation, WdrOutput};
use crate::moderator::Moderator;
use crate::rank::{Equivalence, RrCheck};
use crate::rational::Rational;
use crate::reduce::ReductionResult;
use crate::working::WorkingGraph;

/// A point serializes as the bare vertex id or as {"edge","offset"}.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Vertex(String),
    OnEdge { edge: String, offset: Rational },
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Point::Vertex(v) => PointRepr::Vertex(v.clone()),
            Point::OnEdge { edge, offset } => PointRepr::OnEdge {
                edge: edge.clone(),
                offset: *offset,
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match PointRepr::deserialize(deserializer)? {
            PointRepr::Vertex(v) => Point::Vertex(v),
            PointRepr::OnEdge { edge, offset } => Point::OnEdge { edge, offset },
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DivisorEntry {
    at: Point,
    coeff: i64,
}

impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<DivisorEntry> = self
            .entries()
            .map(|(p, c)| DivisorEntry {
                at: p.clone(),
                coeff: c,
            })
            .collect();
        entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Divisor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<DivisorEntry>::deserialize(deserializer)?;
        Ok(Divisor::from_entries(
            entries.into_iter().map(|e| (e.at, e.coeff)),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default)]
    pub weight: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    pub length: Rational,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GenusDoc {
    pub unweighted: i64,
    pub weighted: i64,
}

impl From<Genus> for GenusDoc {
    fn from(g: Genus) -> Self {
        GenusDoc {
            unweighted: g.unweighted,
            weighted: g.weighted,
        }
    }
}

/// Graph file format. The optional genus block is advisory metadata; the
/// parser does not trust it (fixture tests verify it instead).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<GenusDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &MetricGraph) -> GraphDoc {
        GraphDoc {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexDoc {
                    id: v.id.clone(),
                    weight: v.weight,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ends: [
                        g.vertex_id(e.tail).to_string(),
                        g.vertex_id(e.head).to_string(),
                    ],
                    length: e.length,
                })
                .collect(),
            genus: Some(g.genus().into()),
        }
    }

    pub fn into_graph(self) -> Result<MetricGraph> {
        MetricGraph::new(
            self.vertices
                .into_iter()
                .map(|v| (v.id, v.weight))
                .collect(),
            self.edges
                .into_iter()
                .map(|e| {
                    let [a, b] = e.ends;
                    (e.id, a, b, e.length)
                })
                .collect(),
        )
    }
}

/// Nonzero script values keyed by working-node name; absent keys are zero.
pub fn script_map(wg: &WorkingGraph, script: &FiringScript) -> BTreeMap<String, i64> {
    script
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(n, &v)| (wg.node_name(n), v))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionDoc {
    pub base: Point,
    pub reduced: Divisor,
    pub witness: BTreeMap<String, i64>,
}

pub fn reduction_doc(wg: &WorkingGraph, r: &ReductionResult) -> ReductionDoc {
    ReductionDoc {
        base: r.base.clone(),
        reduced: r.reduced.clone(),
        witness: script_map(wg, &r.witness),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankDoc {
    pub rank: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceDoc {
    pub equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, i64>>,
}

pub fn equivalence_doc(wg: &WorkingGraph, e: &Equivalence) -> EquivalenceDoc {
    EquivalenceDoc {
        equivalent: e.equivalent,
        witness: e.witness.as_ref().map(|w| script_map(wg, w)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RrDoc {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

impl From<&RrCheck> for RrDoc {
    fn from(c: &RrCheck) -> Self {
        RrDoc {
            lhs: c.lhs,
            rhs: c.rhs,
            equal: c.equal,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionIWitnessDoc {
    pub vertex: String,
    pub count: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionIDoc {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConditionIWitnessDoc>,
}

impl From<&ConditionIVerdict> for ConditionIDoc {
    fn from(v: &ConditionIVerdict) -> Self {
        ConditionIDoc {
            holds: v.holds,
            witness: v.witness.as_ref().map(|w| ConditionIWitnessDoc {
                vertex: w.vertex.clone(),
                count: w.count,
                bound: w.bound,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeratorDoc {
    pub order: Vec<String>,
    #[serde(rename = "K")]
    pub k: BTreeMap<String, i64>,
}

pub fn moderator_doc(wg: &WorkingGraph, m: &Moderator) -> ModeratorDoc {
    ModeratorDoc {
        order: m.order.order().iter().map(|&n| wg.node_name(n)).collect(),
        k: m.k_vec()
            .iter()
            .enumerate()
            .map(|(n, &v)| (wg.node_name(n), v))
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtendDoc {
    pub added: Point,
    pub extended: Divisor,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvolutionDoc {
    pub vertex_map: BTreeMap<String, String>,
    /// Keys and values are unit segments of the working graph, written as
    /// "edge-id[segment]".
    pub edge_map: BTreeMap<String, String>,
    pub fixed_vertices: Vec<String>,
    pub quotient_genus: i64,
}

pub fn involution_doc(cert: &InvolutionCert) -> InvolutionDoc {
    let wg = cert.working();
    let edge_name = |i: usize| {
        let e = &wg.edges()[i];
        format!("{}[{}]", wg.base().edges()[e.base_edge].id, e.segment)
    };
    InvolutionDoc {
        vertex_map: (0..wg.node_count())
            .map(|n| (wg.node_name(n), wg.node_name(cert.involution.node_map[n])))
            .collect(),
        edge_map: (0..wg.edge_count())
            .map(|i| (edge_name(i), edge_name(cert.involution.edge_map[i])))
            .collect(),
        fixed_vertices: cert
            .fixed_nodes()
            .into_iter()
            .map(|n| wg.node_name(n))
            .collect(),
        quotient_genus: cert.quotient_genus(),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum RefutationDoc {
    GenusTooSmall { weighted_genus: i64 },
    NoRankOnePair { pairs_checked: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperellipticDoc {
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Divisor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<RefutationDoc>,
}

pub fn hyperelliptic_doc(cert: &HyperellipticCert) -> HyperellipticDoc {
    HyperellipticDoc {
        verdict: cert.verdict,
        witness: cert.witness.clone(),
        involution: cert.involution.as_ref().map(involution_doc),
        refutation: cert.refutation.as_ref().map(|r| match *r {
            Refutation::GenusTooSmall { weighted_genus } => {
                RefutationDoc::GenusTooSmall { weighted_genus }
            }
            Refutation::NoRankOnePair { pairs_checked } => {
                RefutationDoc::NoRankOnePair { pairs_checked }
            }
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WdrDoc {
    pub classes: Vec<Divisor>,
    pub denominator: i64,
    pub complete_for_grid: bool,
}

impl From<&WdrOutput> for WdrDoc {
    fn from(w: &WdrOutput) -> Self {
        WdrDoc {
            classes: w.classes.clone(),
            denominator: w.denominator,
            complete_for_grid: w.complete_for_grid,
        }
    }
}
