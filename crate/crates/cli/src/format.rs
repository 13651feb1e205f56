//! On-disk formats: graph and map JSON, curve/race/coupling CSV, and the
//! JSON reports.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use graphfold_core::analysis::MinimalityReport;
use graphfold_core::convolve::ConvolutionResult;
use graphfold_core::dynamics::WalkCurve;
use graphfold_core::graph::{Graph, GraphFamilySpec, GroupMap, Label};
use graphfold_core::race::HittingRecord;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Shortest round-trip decimal, zero-padded to at least 12 significant
/// digits. Parses back to the same `f64`.
pub fn format_weight(w: f64) -> String {
    let mut s = format!("{w}");
    let digits = s
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    if digits < 12 {
        if !s.contains('.') {
            s.push('.');
        }
        s.extend(std::iter::repeat_n('0', 12 - digits));
    }
    s
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

/// A graph together with its free-form `meta` object.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub meta: Option<Value>,
}

impl GraphFile {
    pub fn new(graph: Graph, meta: Option<Value>) -> Self {
        GraphFile { graph, meta }
    }

    /// Family recorded in `meta`, when it names a built-in one.
    pub fn family(&self) -> Option<GraphFamilySpec> {
        family_from_meta(self.meta.as_ref()?)
    }
}

pub fn family_meta(spec: &GraphFamilySpec) -> Value {
    let parameters = match spec {
        GraphFamilySpec::Hypercube { dim } => json!({ "dim": dim }),
        GraphFamilySpec::Cycle { k } => json!({ "k": k }),
        GraphFamilySpec::Hypercycle { dim, k } => json!({ "dim": dim, "k": k }),
        GraphFamilySpec::WeightedLine { couplings } => json!({ "couplings": couplings }),
        GraphFamilySpec::WeightedLattice { rows, cols } => json!({ "rows": rows, "cols": cols }),
    };
    json!({ "family": spec.name(), "parameters": parameters })
}

pub fn family_from_meta(meta: &Value) -> Option<GraphFamilySpec> {
    let params = meta.get("parameters")?;
    let int = |key: &str| params.get(key)?.as_u64().map(|v| v as usize);
    let list = |key: &str| -> Option<Vec<f64>> {
        params.get(key)?.as_array()?.iter().map(Value::as_f64).collect()
    };
    Some(match meta.get("family")?.as_str()? {
        "hypercube" => GraphFamilySpec::Hypercube { dim: int("dim")? },
        "cycle" => GraphFamilySpec::Cycle { k: int("k")? },
        "hypercycle" => GraphFamilySpec::Hypercycle {
            dim: int("dim")?,
            k: int("k")?,
        },
        "weighted_line" => GraphFamilySpec::WeightedLine {
            couplings: list("couplings")?,
        },
        "weighted_lattice" => GraphFamilySpec::WeightedLattice {
            rows: list("rows")?,
            cols: list("cols")?,
        },
        _ => return None,
    })
}

pub fn graph_to_json(file: &GraphFile) -> String {
    let g = &file.graph;
    let mut out = String::new();
    let _ = writeln!(out, "{{\n  \"nodes\": {},", g.node_count());
    out.push_str("  \"edges\": [");
    for (k, e) in g.edges().iter().enumerate() {
        let sep = if k == 0 { "\n" } else { ",\n" };
        let _ = write!(out, "{sep}    [{}, {}, {}]", e.i, e.j, format_weight(e.weight));
    }
    out.push_str(if g.edges().is_empty() { "]" } else { "\n  ]" });
    if let Some(labels) = g.labels() {
        out.push_str(",\n  \"labels\": [");
        for (k, l) in labels.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(&serde_json::to_string(l).expect("integer label"));
        }
        out.push(']');
    }
    if let Some(meta) = &file.meta {
        let _ = write!(out, ",\n  \"meta\": {}", serde_json::to_string(meta).expect("json"));
    }
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    labels: Option<Vec<Label>>,
    #[serde(default)]
    meta: Option<Value>,
}

fn parse_error(origin: &str, e: serde_json::Error) -> CliError {
    CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn invalid(origin: &str, field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        path: origin.to_string(),
        field: field.into(),
        message: message.into(),
    }
}

/// Parses a graph document; `origin` names the source in diagnostics.
pub fn graph_from_json(text: &str, origin: &str) -> CliResult<GraphFile> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
    for (k, &(i, j, w)) in doc.edges.iter().enumerate() {
        let field = format!("edges[{k}]");
        if i >= j {
            return Err(invalid(origin, field, format!("expected i < j, found [{i}, {j}]")));
        }
        if j >= doc.nodes {
            return Err(invalid(
                origin,
                field,
                format!("node {j} out of range for {} nodes", doc.nodes),
            ));
        }
        if w.is_nan() || w <= 0.0 {
            return Err(invalid(origin, field, format!("weight {w} must be positive")));
        }
    }
    if let Some(meta) = &doc.meta {
        if !meta.is_object() {
            return Err(invalid(origin, "meta", "expected an object"));
        }
    }
    let graph = Graph::new(doc.nodes, doc.edges, doc.labels)
        .map_err(|e| invalid(origin, "graph", e.to_string()))?;
    Ok(GraphFile {
        graph,
        meta: doc.meta,
    })
}

pub fn map_to_json(result: &ConvolutionResult) -> String {
    let doc = json!({
        "method": result.method.as_str(),
        "target_count": result.map.target_count(),
        "assignment": result.map.assignment(),
    });
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

#[derive(Deserialize)]
struct MapDoc {
    assignment: Vec<usize>,
    #[serde(default)]
    target_count: Option<usize>,
}

pub fn map_from_json(text: &str, origin: &str) -> CliResult<GroupMap> {
    let doc: MapDoc = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
    let target_count = match doc.target_count {
        Some(t) => t,
        None => doc.assignment.iter().max().map_or(0, |m| m + 1),
    };
    GroupMap::new(doc.assignment.len(), target_count, doc.assignment)
        .map_err(|e| invalid(origin, "assignment", e.to_string()))
}

pub fn write_curve_csv(mut out: impl Write, curve: &WalkCurve) -> std::io::Result<()> {
    let mut header = String::from("t");
    for v in 0..curve.node_count() {
        let _ = write!(header, ",node_{v}");
    }
    if curve.has_sink() {
        header.push_str(",sink");
    }
    writeln!(out, "{header}")?;
    for (s, row) in curve.rows().iter().enumerate() {
        let mut line = format_g12(curve.grid().time(s));
        for p in row {
            line.push(',');
            line.push_str(&format_g12(*p));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_race_csv(mut out: impl Write, records: &[HittingRecord]) -> std::io::Result<()> {
    writeln!(out, "pair,source,target,d,classical_steps,quantum_steps,winner")?;
    let steps = |o: graphfold_core::dynamics::HitOutcome| {
        o.step().map_or_else(|| "-1".to_string(), |s| s.to_string())
    };
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.pair,
            r.source,
            r.target,
            r.distance,
            steps(r.classical),
            steps(r.quantum),
            r.winner.as_str()
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub a: String,
    pub b: String,
    pub max_deviation: f64,
}

pub fn deviations_to_json(rows: &[DeviationRow]) -> String {
    serde_json::to_string_pretty(rows).expect("json") + "\n"
}

pub fn report_to_json(report: &MinimalityReport) -> String {
    let groups: Vec<Value> = report
        .partition
        .groups
        .iter()
        .map(|g| json!({ "d": g.distance, "nodes": g.nodes }))
        .collect();
    let doc = json!({
        "group_count": report.group_count,
        "distinct_eigenvalue_count": report.distinct_eigenvalue_count,
        "verdict": report.verdict.as_str(),
        "groups": groups,
        "eigenvalues": {
            "full": report.spectrum.values(),
            "distinct": report.distinct.values,
        },
    });
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

/// `(from, to, coupling)` rows of a path graph, 1-based along the path.
pub fn coupling_rows(line: &Graph) -> CliResult<Vec<(usize, usize, f64)>> {
    if !line.is_path() {
        return Err(CliError::Core(graphfold_core::Error::Domain(
            "coupling export needs a path graph 0 - 1 - ... - (n-1)".into(),
        )));
    }
    Ok(line.edges().iter().map(|e| (e.i + 1, e.j + 1, e.weight)).collect())
}

pub fn write_coupling_csv(mut out: impl Write, rows: &[(usize, usize, f64)]) -> std::io::Result<()> {
    writeln!(out, "from,to,coupling")?;
    for &(a, b, w) in rows {
        writeln!(out, "{a},{b},{}", format_g12(w))?;
    }
    Ok(())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_graph(path: &Path) -> CliResult<GraphFile> {
    graph_from_json(&read_text(path)?, &path.display().to_string())
}

pub fn read_map(path: &Path) -> CliResult<GroupMap> {
    map_from_json(&read_text(path)?, &path.display().to_string())
}

/// `meta` for a convolution output: the reduced family when it is one,
/// plus the method.
pub fn reduced_meta(result: &ConvolutionResult, family: Option<&GraphFamilySpec>) -> Value {
    let mut meta = match family {
        Some(f) => family_meta(f),
        None => Value::Object(Map::new()),
    };
    meta.as_object_mut()
        .expect("object")
        .insert("method".into(), Value::from(result.method.as_str()));
    meta
}
