//! Command-line front end for divisor computations on metric graphs.
//!
//! Every subcommand reads JSON files, writes one JSON document to stdout,
//! and reports failures as `{"error":{...}}` on stderr. Output is compact
//! and byte-deterministic unless `--pretty` is given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Serialize;

use chipfire::json::{self, ConditionIDoc, ExtendDoc, GenusDoc, GraphDoc, RankDoc, RrDoc, WdrDoc};
use chipfire::{
    canonical_divisor, dominating_moderator, extend_reduced, find_involution, hyp_rank,
    is_hyperelliptic, oracle_equivalent, oracle_rank, p_value, rank_weighted, reduce, rr_check,
    wdr_enumerate, Divisor, Error, MetricGraph, Moderator, OracleCaps, Point, RankEngine,
    Rational, WdrCaps, WorkingGraph,
};

/// Divisor computations on vertex-weighted metric graphs.
#[derive(Parser)]
#[command(name = "chipfire", version, about)]
struct Cli {
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus of a graph.
    Genus {
        graph: PathBuf,
        /// Emit the graph as DOT instead of JSON.
        #[arg(long)]
        emit_dot: bool,
    },
    /// Reduce a divisor at a base point.
    Reduce {
        graph: PathBuf,
        divisor: PathBuf,
        /// Base point, e.g. "v0" or "e1@1/2" (default: smallest vertex id).
        #[arg(long, value_name = "POINT")]
        base: Option<String>,
    },
    /// Rank of a divisor.
    Rank { graph: PathBuf, divisor: PathBuf },
    /// Decide linear equivalence of two divisors.
    Equiv {
        graph: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// Canonical divisor of a graph.
    Canonical { graph: PathBuf },
    /// Riemann-Roch balance of a divisor.
    RrCheck { graph: PathBuf, divisor: PathBuf },
    /// Hyperelliptic certification of a graph.
    Hyperelliptic { graph: PathBuf },
    /// Tree-quotient involution of a graph, if it has one.
    Involution { graph: PathBuf },
    /// Pencil multiplicity p(D) on a hyperelliptic graph.
    P { graph: PathBuf, divisor: PathBuf },
    /// Closed-form rank on a hyperelliptic graph.
    HypRank { graph: PathBuf, divisor: PathBuf },
    /// Parallel-edge bound at every vertex.
    ConditionI { graph: PathBuf },
    /// Dominating moderator for a divisor reduced at the base.
    Moderator {
        graph: PathBuf,
        divisor: PathBuf,
        /// Base point (default: smallest vertex id).
        #[arg(long, value_name = "POINT")]
        base: Option<String>,
        /// Emit the acyclic orientation as DOT instead of JSON.
        #[arg(long)]
        emit_dot: bool,
    },
    /// Add one chip to a reduced divisor, keeping it reduced.
    Extend {
        graph: PathBuf,
        divisor: PathBuf,
        /// Base point (default: smallest vertex id).
        #[arg(long, value_name = "POINT")]
        base: Option<String>,
    },
    /// Enumerate the classes of degree d and rank at least r on a grid.
    Wdr {
        graph: PathBuf,
        /// Degree of the classes.
        #[arg(short)]
        d: i64,
        /// Lower bound on the rank.
        #[arg(short)]
        r: i64,
        /// Grid spacing 1/denominator along every edge.
        #[arg(long, default_value_t = 1, value_name = "N")]
        denominator: i64,
        /// Cap on the number of candidate divisors.
        #[arg(long, value_name = "N")]
        caps: Option<u64>,
    },
    /// Definitional rank via the lattice oracle.
    OracleRank {
        graph: PathBuf,
        divisor: PathBuf,
        /// Cap on the per-stage enumeration size.
        #[arg(long, value_name = "N")]
        caps: Option<u64>,
    },
    /// Linear equivalence via lattice membership.
    OracleEquiv {
        graph: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // The global pool can only be configured once; a second attempt in
        // the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli.command, cli.pretty) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.code)
        }
    }
}

/// A failure destined for stderr, with its process exit code.
struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: String) -> Failure {
        Failure {
            kind: "invalid-input",
            message,
            code: 2,
        }
    }

    fn to_json(&self) -> String {
        serde_json::json!({"error": {"kind": self.kind, "message": self.message}}).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (kind, code) = match &e {
            Error::InvalidGraph(_) => ("invalid-graph", 2),
            Error::InvalidInput(_) => ("invalid-input", 2),
            Error::Precondition(_) => ("precondition", 3),
            Error::ResourceCap(_) => ("resource-cap", 4),
            Error::Internal(_) => ("internal", 1),
        };
        Failure {
            kind,
            message: e.to_string(),
            code,
        }
    }
}

fn run(command: &Command, pretty: bool) -> Result<String, Failure> {
    match command {
        Command::Genus { graph, emit_dot } => {
            let g = load_graph(graph)?;
            if *emit_dot {
                Ok(graph_dot(&g))
            } else {
                Ok(emit(&GenusDoc::from(g.genus()), pretty))
            }
        }
        Command::Reduce {
            graph,
            divisor,
            base,
        } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let base = resolve_base(&g, base)?;
            let wg = working_for(&g, &d, &base)?;
            let r = reduce(&wg, &d, &base)?;
            Ok(emit(&json::reduction_doc(&wg, &r), pretty))
        }
        Command::Rank { graph, divisor } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let rank = rank_weighted(&g, &d)?;
            Ok(emit(&RankDoc { rank }, pretty))
        }
        Command::Equiv {
            graph,
            first,
            second,
        } => {
            let g = load_graph(graph)?;
            let d1 = load_divisor(first, &g)?;
            let d2 = load_divisor(second, &g)?;
            let mut dens = d1.denominators();
            dens.extend(d2.denominators());
            let engine = RankEngine::new(&g, &dens)?;
            let e = engine.linearly_equivalent(&d1, &d2)?;
            Ok(emit(&json::equivalence_doc(engine.working(), &e), pretty))
        }
        Command::Canonical { graph } => {
            let g = load_graph(graph)?;
            Ok(emit(&canonical_divisor(&g, true), pretty))
        }
        Command::RrCheck { graph, divisor } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let check = rr_check(&g, &d)?;
            Ok(emit(&RrDoc::from(&check), pretty))
        }
        Command::Hyperelliptic { graph } => {
            let g = load_graph(graph)?;
            let cert = is_hyperelliptic(&g)?;
            Ok(emit(&json::hyperelliptic_doc(&cert), pretty))
        }
        Command::Involution { graph } => {
            let g = load_graph(graph)?;
            match find_involution(&g)? {
                Some(cert) => Ok(emit(&json::involution_doc(&cert), pretty)),
                None => Ok(emit(&serde_json::json!({"found": false}), pretty)),
            }
        }
        Command::P { graph, divisor } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let p = p_value(&g, &d)?;
            Ok(emit(&serde_json::json!({ "p": p }), pretty))
        }
        Command::HypRank { graph, divisor } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let rank = hyp_rank(&g, &d)?;
            Ok(emit(&RankDoc { rank }, pretty))
        }
        Command::ConditionI { graph } => {
            let g = load_graph(graph)?;
            Ok(emit(&ConditionIDoc::from(&g.check_condition_i()), pretty))
        }
        Command::Moderator {
            graph,
            divisor,
            base,
            emit_dot,
        } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let base = resolve_base(&g, base)?;
            let wg = working_for(&g, &d, &base)?;
            let m = dominating_moderator(&wg, &d, &base)?;
            if *emit_dot {
                Ok(orientation_dot(&wg, &m))
            } else {
                Ok(emit(&json::moderator_doc(&wg, &m), pretty))
            }
        }
        Command::Extend {
            graph,
            divisor,
            base,
        } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let base = resolve_base(&g, base)?;
            let wg = working_for(&g, &d, &base)?;
            let added = extend_reduced(&wg, &d, &base)?;
            let extended = d.add(&Divisor::single(added.clone(), 1));
            Ok(emit(&ExtendDoc { added, extended }, pretty))
        }
        Command::Wdr {
            graph,
            d,
            r,
            denominator,
            caps,
        } => {
            let g = load_graph(graph)?;
            let caps = match caps {
                Some(c) => WdrCaps { max_candidates: *c },
                None => WdrCaps::default(),
            };
            let out = wdr_enumerate(&g, *d, *r, *denominator, caps)?;
            Ok(emit(&WdrDoc::from(&out), pretty))
        }
        Command::OracleRank {
            graph,
            divisor,
            caps,
        } => {
            let g = load_graph(graph)?;
            let d = load_divisor(divisor, &g)?;
            let caps = match caps {
                Some(c) => OracleCaps { max_pairs: *c },
                None => OracleCaps::default(),
            };
            let rank = oracle_rank(&g, &d, caps)?;
            Ok(emit(&RankDoc { rank }, pretty))
        }
        Command::OracleEquiv {
            graph,
            first,
            second,
        } => {
            let g = load_graph(graph)?;
            let d1 = load_divisor(first, &g)?;
            let d2 = load_divisor(second, &g)?;
            let equivalent = oracle_equivalent(&g, &d1, &d2)?;
            Ok(emit(&serde_json::json!({ "equivalent": equivalent }), pretty))
        }
    }
}

fn emit<T: Serialize>(value: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("document serializes")
    } else {
        serde_json::to_string(value).expect("document serializes")
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MetricGraph, Failure> {
    let text = read_file(path)?;
    let doc: GraphDoc = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(doc.into_graph()?)
}

fn load_divisor(path: &Path, g: &MetricGraph) -> Result<Divisor, Failure> {
    let text = read_file(path)?;
    let d: Divisor = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    d.validate(g)?;
    Ok(d)
}

/// Parses "v0" as a vertex or "e1@1/2" as an interior point.
fn parse_point(s: &str) -> Result<Point, Failure> {
    match s.split_once('@') {
        None => Ok(Point::vertex(s)),
        Some((edge, offset)) => {
            let offset = Rational::from_str(offset)
                .map_err(|e| Failure::input(format!("bad point {s:?}: {e}")))?;
            Ok(Point::on_edge(edge, offset))
        }
    }
}

fn resolve_base(g: &MetricGraph, base: &Option<String>) -> Result<Point, Failure> {
    match base {
        None => Ok(g.default_base()),
        Some(s) => {
            let p = parse_point(s)?;
            g.validate_point(&p)?;
            Ok(p)
        }
    }
}

fn point_denominator(p: &Point) -> i64 {
    match p {
        Point::Vertex(_) => 1,
        Point::OnEdge { offset, .. } => offset.denom(),
    }
}

/// Working graph whose grid carries both the divisor and the base point.
fn working_for(g: &MetricGraph, d: &Divisor, base: &Point) -> Result<WorkingGraph, Failure> {
    let mut dens = d.denominators();
    dens.push(point_denominator(base));
    Ok(WorkingGraph::new(g, &dens)?)
}

fn graph_dot(g: &MetricGraph) -> String {
    let mut out = String::from("graph {\n");
    for v in g.vertices() {
        if v.weight > 0 {
            let _ = writeln!(out, "  \"{}\" [label=\"{} ({})\"];", v.id, v.id, v.weight);
        } else {
            let _ = writeln!(out, "  \"{}\";", v.id);
        }
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [label=\"{} ({})\"];",
            g.vertex_id(e.tail),
            g.vertex_id(e.head),
            e.id,
            e.length
        );
    }
    out.push('}');
    out
}

/// The moderator's acyclic orientation: every unit segment points from the
/// later node to the earlier node of the order.
fn orientation_dot(wg: &WorkingGraph, m: &Moderator) -> String {
    let mut out = String::from("digraph {\n");
    for node in 0..wg.node_count() {
        let _ = writeln!(out, "  \"{}\";", wg.node_name(node));
    }
    for e in wg.edges() {
        let (from, to) = if m.order.position(e.a) > m.order.position(e.b) {
            (e.a, e.b)
        } else {
            (e.b, e.a)
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            wg.node_name(from),
            wg.node_name(to)
        );
    }
    out.push('}');
    out
}
