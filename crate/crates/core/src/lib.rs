//! Divisor theory on vertex-weighted metric graphs: reduced divisors,
//! ranks, moderators, and hyperelliptic structure, with an independent
//! lattice-based oracle for cross-checking.

pub mod automorphism;
pub mod corpus;
pub mod divisor;
pub mod error;
pub mod graph;
pub mod hyperelliptic;
pub mod json;
pub mod moderator;
pub mod oracle;
pub mod rank;
pub mod rational;
pub mod reduce;
pub mod working;

pub use automorphism::{
    involutive_automorphisms, quotient_genus, tree_quotient_involutions, validate_involution,
    GraphInvolution,
};
pub use divisor::{apply_script, canonical_divisor, Divisor, FiringScript};
pub use error::{Error, Result};
pub use graph::{Genus, MetricGraph, Point, PointMap};
pub use hyperelliptic::{
    find_involution, g12_class, hyp_rank, is_hyperelliptic, p_value, wdr_enumerate,
    HyperellipticCert, InvolutionCert, Refutation, WdrCaps, WdrOutput,
};
pub use oracle::{oracle_equivalent, oracle_rank, LaplacianLattice, OracleCaps};

pub use moderator::{
    dominating_moderator, extend_reduced, moderator_from_order, AcyclicOrder, Moderator,
};
pub use rank::{
    linearly_equivalent, rank, rank_weighted, rr_check, scale_lengths, Equivalence, RankEngine,
    RrCheck,
};
pub use rational::Rational;
pub use reduce::{dhar_burn, is_reduced, peel_sequence, reduce, PeelOutcome, ReductionResult};
pub use working::WorkingGraph;
