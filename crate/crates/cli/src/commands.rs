use std::io::Read;
use std::path::Path;

use ricciflat::atlas::{self, named_graph, verify_atlas, AtlasError};
use ricciflat::canon::canonical_form;
use ricciflat::curvature::{curvature_profile, is_ricci_flat, CurvatureError, Probe, ProfileRow};
use ricciflat::format::{parse_graph, serialize_graph, to_graph6, GraphFormat, ParseError};
use ricciflat::local::{
    check_lemma2, classify_four_cycle_edge, edge_cycle_profile, neighbor_distances, orient, verify_tables,
    DistanceWitness, LocalError,
};
use ricciflat::rational::{self, approx};
use ricciflat::search::brute::{self, RunOptions};
use ricciflat::search::guided::{guided_search_with, DEFAULT_GUARD};
use ricciflat::search::{CaseOutcome, Counters, Mode, SearchConstraints, SearchError};
use ricciflat::{Graph, GraphError, Rational};
use serde::Serialize;

use crate::output::{emit, json_report, sha256_hex, table, InputInfo};
use crate::{Cli, Command, Common, Failure, GraphInput, InputFormat, OutputFormat, VerifyTarget};

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Curvature { input, edge, alpha } => curvature(c, input, edge.as_deref(), alpha),
        Command::CheckFlat { input } => check_flat(c, input),
        Command::Classify { input, edge } => classify(c, input, edge),
        Command::Atlas { name, parameter, output } => atlas_export(c, name, *parameter, output.as_deref()),
        Command::Verify { target } => verify(c, *target),
        Command::Search { mode, max_vertices, checkpoint } => search(c, *mode, *max_vertices, checkpoint.as_deref()),
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CurvatureError> for Failure {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::Graph(_)
            | CurvatureError::Isolated(_)
            | CurvatureError::NotAdjacent(..)
            | CurvatureError::AlphaOutOfRange(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<LocalError> for Failure {
    fn from(e: LocalError) -> Self {
        match e {
            LocalError::Curvature(c) => c.into(),
            LocalError::Audit(m) => Failure::Internal(m),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<AtlasError> for Failure {
    fn from(e: AtlasError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Constraint(_) | SearchError::ResourceGuard(_) => Failure::Usage(e.to_string()),
            SearchError::HashMismatch { .. } | SearchError::CorruptCheckpoint(_) | SearchError::Io(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn report_format(c: &Common) -> Result<OutputFormat, Failure> {
    match c.format.unwrap_or(OutputFormat::Json) {
        f @ (OutputFormat::Json | OutputFormat::Table) => Ok(f),
        _ => Err(Failure::Usage("this subcommand writes json or table output".into())),
    }
}

fn progress(c: &Common, msg: impl FnOnce() -> String) {
    if c.verbose > 0 {
        eprintln!("{}", msg());
    }
}

struct Loaded {
    graph: Graph,
    info: InputInfo,
}

fn load(input: &GraphInput) -> Result<Loaded, Failure> {
    let path = &input.file;
    let stdin = path == Path::new("-");
    let bytes = if stdin {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?
    };
    let format = input.input_format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("g6") => InputFormat::Graph6,
            _ => InputFormat::Edgelist,
        }
    });
    let (gf, name) = match format {
        InputFormat::Edgelist => (GraphFormat::Edgelist, "edgelist"),
        InputFormat::Graph6 => (GraphFormat::Graph6, "graph6"),
    };
    let graph = parse_graph(&bytes, gf).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let info = InputInfo {
        path: Some(path.display().to_string()),
        format: Some(name),
        sha256: sha256_hex(&bytes),
        vertices: Some(graph.order()),
        edges: Some(graph.size()),
    };
    Ok(Loaded { graph, info })
}

fn edge_arg(g: &Graph, edge: &[usize]) -> Result<(usize, usize), Failure> {
    let (u, v) = (edge[0], edge[1]);
    g.check_edge(u, v).map_err(|e| match e {
        GraphError::NotAnEdge(..) => Failure::Usage(format!("{u}-{v} is not an edge of the input graph")),
        e => Failure::Usage(e.to_string()),
    })?;
    Ok((u, v))
}

fn decimal(c: &Common, r: &Rational) -> Option<f64> {
    c.decimal.then(|| approx(r))
}

fn fmt_decimal(c: &Common, r: &Option<Rational>) -> Vec<String> {
    match (c.decimal, r) {
        (false, _) => vec![],
        (true, Some(r)) => vec![format!("{:.6}", approx(r))],
        (true, None) => vec!["-".into()],
    }
}

#[derive(Serialize)]
struct EdgeRow {
    edge: (usize, usize),
    #[serde(with = "rational::as_string")]
    kappa: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_decimal: Option<f64>,
    flat: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    probes: Vec<Probe>,
}

#[derive(Serialize)]
struct Profile {
    edge: (usize, usize),
    rows: Vec<ProfileRow>,
}

#[derive(Serialize)]
struct CurvatureBody {
    edge_count: usize,
    flat_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_ricci_flat: Option<bool>,
    #[serde(with = "rational::as_opt_string")]
    min_kappa: Option<Rational>,
    #[serde(with = "rational::as_opt_string")]
    max_kappa: Option<Rational>,
    edges: Vec<EdgeRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    profiles: Vec<Profile>,
}

fn curvature(c: &Common, input: &GraphInput, edge: Option<&[usize]>, alphas: &[Rational]) -> Result<u8, Failure> {
    let fmt = report_format(c)?;
    let Loaded { graph: g, info } = load(input)?;
    let reports = match edge {
        Some(e) => {
            let (x, y) = edge_arg(&g, e)?;
            vec![ricciflat::curvature::ricci_curvature(&g, x, y)?]
        }
        None => is_ricci_flat(&g)?.edges,
    };
    progress(c, || format!("computed {} edge curvatures", reports.len()));
    let mut profiles = Vec::new();
    if !alphas.is_empty() {
        for r in &reports {
            let (x, y) = r.edge;
            profiles.push(Profile { edge: r.edge, rows: curvature_profile(&g, x, y, alphas)? });
        }
    }
    let body = CurvatureBody {
        edge_count: reports.len(),
        flat_edges: reports.iter().filter(|r| r.flat).count(),
        is_ricci_flat: edge.is_none().then(|| reports.iter().all(|r| r.flat)),
        min_kappa: reports.iter().map(|r| &r.kappa).min().cloned(),
        max_kappa: reports.iter().map(|r| &r.kappa).max().cloned(),
        edges: reports
            .into_iter()
            .map(|r| EdgeRow { kappa_decimal: decimal(c, &r.kappa), edge: r.edge, flat: r.flat, kappa: r.kappa, probes: r.probes })
            .collect(),
        profiles,
    };
    let text = match fmt {
        OutputFormat::Json => json_report(c, "curvature", &info, &body),
        _ => {
            let mut header = vec!["edge", "kappa"];
            if c.decimal {
                header.push("decimal");
            }
            let rows: Vec<Vec<String>> = body
                .edges
                .iter()
                .map(|e| {
                    let mut row = vec![format!("{}-{}", e.edge.0, e.edge.1), rational::format(&e.kappa)];
                    row.extend(fmt_decimal(c, &Some(e.kappa.clone())));
                    row
                })
                .collect();
            let mut out = table(&header, &rows);
            if let Some(flat) = body.is_ricci_flat {
                out.push_str(&format!(
                    "ricci-flat: {} ({}/{} edges flat)\n",
                    if flat { "yes" } else { "no" },
                    body.flat_edges,
                    body.edge_count
                ));
            }
            for p in &body.profiles {
                out.push_str(&format!("\nprofile of {}-{}\n", p.edge.0, p.edge.1));
                let mut header = vec!["alpha", "W", "quotient"];
                if c.decimal {
                    header.push("decimal");
                }
                let rows: Vec<Vec<String>> = p
                    .rows
                    .iter()
                    .map(|r| {
                        let q = r.quotient.as_ref().map_or("-".to_string(), rational::format);
                        let mut row = vec![rational::format(&r.alpha), rational::format(&r.wasserstein), q];
                        row.extend(fmt_decimal(c, &r.quotient));
                        row
                    })
                    .collect();
                out.push_str(&table(&header, &rows));
            }
            out
        }
    };
    emit(&text, None)?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckFlatBody {
    is_ricci_flat: bool,
    edge_count: usize,
    flat_edges: usize,
    non_flat: Vec<EdgeRow>,
}

fn check_flat(c: &Common, input: &GraphInput) -> Result<u8, Failure> {
    let fmt = report_format(c)?;
    let Loaded { graph: g, info } = load(input)?;
    let report = is_ricci_flat(&g)?;
    let body = CheckFlatBody {
        is_ricci_flat: report.is_ricci_flat,
        edge_count: report.edges.len(),
        flat_edges: report.flat_edges,
        non_flat: report
            .non_flat()
            .map(|r| EdgeRow {
                edge: r.edge,
                kappa: r.kappa.clone(),
                kappa_decimal: decimal(c, &r.kappa),
                flat: false,
                probes: vec![],
            })
            .collect(),
    };
    let text = match fmt {
        OutputFormat::Json => json_report(c, "check-flat", &info, &body),
        _ => {
            let mut out = format!(
                "ricci-flat: {} ({}/{} edges flat)\n",
                if body.is_ricci_flat { "yes" } else { "no" },
                body.flat_edges,
                body.edge_count
            );
            if !body.non_flat.is_empty() {
                let rows: Vec<Vec<String>> = body
                    .non_flat
                    .iter()
                    .map(|e| {
                        let mut row = vec![format!("{}-{}", e.edge.0, e.edge.1), rational::format(&e.kappa)];
                        row.extend(fmt_decimal(c, &Some(e.kappa.clone())));
                        row
                    })
                    .collect();
                let header: &[&str] = if c.decimal { &["edge", "kappa", "decimal"] } else { &["edge", "kappa"] };
                out.push_str(&table(header, &rows));
            }
            out
        }
    };
    emit(&text, None)?;
    Ok(if body.is_ricci_flat { 0 } else { 1 })
}

#[derive(Serialize)]
struct ClassifyBody {
    edge: (usize, usize),
    /// The edge as the classifier reads it, lower degree first.
    oriented: (usize, usize),
    degrees: (usize, usize),
    triangles: usize,
    four_cycles: usize,
    five_cycles: usize,
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    flat_compatible: bool,
    witnesses: Vec<DistanceWitness>,
}

fn classify(c: &Common, input: &GraphInput, edge: &[usize]) -> Result<u8, Failure> {
    let fmt = report_format(c)?;
    let Loaded { graph: g, info } = load(input)?;
    let (x, y) = edge_arg(&g, edge)?;
    let p = edge_cycle_profile(&g, x, y)?;
    let (class, reason, ok) = if p.triangle_count == 0 && p.four_cycle_count == 0 {
        let case = check_lemma2(&g, x, y)?;
        let reason = match &case {
            ricciflat::local::NoFourCycleCase::Violation(r) => Some(r.clone()),
            _ => None,
        };
        (case.name(), reason, !case.is_violation())
    } else {
        let class = classify_four_cycle_edge(&g, x, y)?;
        let reason = match &class {
            ricciflat::local::FourCycleClass::NotFlatCompatible(r) => Some(r.clone()),
            _ => None,
        };
        (class.name(), reason, class.is_flat_compatible())
    };
    let oriented = orient(&g, x, y);
    let body = ClassifyBody {
        edge: (x, y),
        oriented,
        degrees: (g.degree(oriented.0), g.degree(oriented.1)),
        triangles: p.triangle_count,
        four_cycles: p.four_cycle_count,
        five_cycles: p.five_cycle_count,
        class,
        reason,
        flat_compatible: ok,
        witnesses: neighbor_distances(&g, x, y)?,
    };
    let text = match fmt {
        OutputFormat::Json => json_report(c, "classify", &info, &body),
        _ => {
            let mut out = format!("{}\n", body.class);
            if let Some(r) = &body.reason {
                out.push_str(&format!("reason: {r}\n"));
            }
            out.push_str(&format!(
                "edge {}-{}: degrees {},{}; {} triangle(s), {} 4-cycle(s), {} 5-cycle(s)\n",
                body.oriented.0,
                body.oriented.1,
                body.degrees.0,
                body.degrees.1,
                body.triangles,
                body.four_cycles,
                body.five_cycles
            ));
            let rows: Vec<Vec<String>> = body
                .witnesses
                .iter()
                .map(|w| {
                    let d = w.distance.map_or("inf".to_string(), |d| d.to_string());
                    vec![w.from.to_string(), w.to.to_string(), d]
                })
                .collect();
            out.push_str(&table(&["from", "to", "distance"], &rows));
            out
        }
    };
    emit(&text, None)?;
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct AtlasBody {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<usize>,
    expected_flat: atlas::Expectation,
    note: &'static str,
    vertices: usize,
    edges: Vec<(usize, usize)>,
    graph6: String,
    canonical_form: String,
}

fn atlas_export(c: &Common, name: &str, parameter: Option<usize>, to: Option<&Path>) -> Result<u8, Failure> {
    let entry = named_graph(name, parameter)?;
    let g = &entry.graph;
    let text = match c.format.unwrap_or(OutputFormat::Edgelist) {
        OutputFormat::Edgelist => String::from_utf8(serialize_graph(g, GraphFormat::Edgelist)).expect("ascii"),
        OutputFormat::Graph6 => String::from_utf8(serialize_graph(g, GraphFormat::Graph6)).expect("ascii"),
        OutputFormat::Dot => String::from_utf8(serialize_graph(g, GraphFormat::Dot)).expect("ascii"),
        OutputFormat::Json => {
            let args = match entry.parameter {
                Some(p) => format!("atlas {} {p}", entry.name),
                None => format!("atlas {}", entry.name),
            };
            let canonical = canonical_form(g).map_err(|e| Failure::Usage(e.to_string()))?;
            let body = AtlasBody {
                name: entry.name.clone(),
                parameter: entry.parameter,
                expected_flat: entry.expected_flat,
                note: entry.note,
                vertices: g.order(),
                edges: g.edges().to_vec(),
                graph6: to_graph6(g),
                canonical_form: canonical.to_string(),
            };
            json_report(c, "atlas", &InputInfo::arguments(&args), &body)
        }
        OutputFormat::Table => return Err(Failure::Usage("atlas writes edgelist, graph6, dot or json".into())),
    };
    emit(&text, to)?;
    Ok(0)
}

fn verify(c: &Common, target: VerifyTarget) -> Result<u8, Failure> {
    let fmt = report_format(c)?;
    let (text, pass) = match target {
        VerifyTarget::Tables => {
            let r = verify_tables();
            let pass = r.passed == r.total;
            let text = match fmt {
                OutputFormat::Json => json_report(c, "verify", &InputInfo::arguments("verify tables"), &r),
                _ => {
                    let rows: Vec<Vec<String>> = r
                        .rows
                        .iter()
                        .map(|row| {
                            let mut v = vec![
                                row.spec.table.to_string(),
                                row.spec.row.to_string(),
                                format!("({},{})", row.spec.degrees.0, row.spec.degrees.1),
                                rational::format(&row.spec.expected),
                                row.computed.as_ref().map_or("-".into(), rational::format),
                            ];
                            v.extend(fmt_decimal(c, &row.computed));
                            v.push(if row.pass { "pass" } else { "FAIL" }.into());
                            v
                        })
                        .collect();
                    let mut header = vec!["table", "row", "degrees", "expected", "computed"];
                    if c.decimal {
                        header.push("decimal");
                    }
                    header.push("status");
                    let mut out = table(&header, &rows);
                    out.push_str(&format!("{}/{} rows pass\n", r.passed, r.total));
                    out
                }
            };
            (text, pass)
        }
        VerifyTarget::Atlas => {
            let r = verify_atlas();
            let pass = r.passed == r.total;
            let text = match fmt {
                OutputFormat::Json => json_report(c, "verify", &InputInfo::arguments("verify atlas"), &r),
                _ => {
                    let rows: Vec<Vec<String>> = r
                        .rows
                        .iter()
                        .map(|row| {
                            let name = match row.parameter {
                                Some(p) => format!("{}({p})", row.name),
                                None => row.name.clone(),
                            };
                            let expected = match row.expected_flat {
                                atlas::Expectation::Flat => "flat",
                                atlas::Expectation::NotFlat => "not flat",
                                atlas::Expectation::Unknown => "unknown",
                            };
                            vec![
                                name,
                                row.vertices.to_string(),
                                row.edges.to_string(),
                                expected.into(),
                                format!("{}/{}", row.flat_edges, row.checked_edges),
                                if row.pass { "pass" } else { "FAIL" }.into(),
                            ]
                        })
                        .collect();
                    let mut out = table(&["graph", "n", "m", "expected", "flat edges", "status"], &rows);
                    out.push_str(&format!("{}/{} entries pass\n", r.passed, r.total));
                    out
                }
            };
            (text, pass)
        }
    };
    emit(&text, None)?;
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct FoundRow {
    form: String,
    vertices: usize,
    edges: usize,
    /// Atlas name when the graph is a known flat graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    known: Option<&'static str>,
}

#[derive(Serialize)]
struct SearchBody {
    constraints: SearchConstraints,
    complete: bool,
    found: Vec<FoundRow>,
    /// Known flat graphs inside the searched range.
    expected: Vec<&'static str>,
    matches_expected: bool,
    counters: Counters,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cases: Vec<CaseOutcome>,
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

fn search(c: &Common, mode: Mode, max_vertices: Option<usize>, checkpoint: Option<&Path>) -> Result<u8, Failure> {
    let fmt = report_format(c)?;
    let result = match mode {
        Mode::Brute => {
            let constraints = SearchConstraints::brute(max_vertices.unwrap_or(12));
            progress(c, || format!("brute search up to {} vertices", constraints.max_vertices));
            let opts = RunOptions {
                jobs: c.jobs.map(|j| j as usize),
                checkpoint: checkpoint.map(Path::to_path_buf),
                stop_after_tasks: None,
            };
            brute::run(&constraints, &opts)?
        }
        Mode::Guided => {
            if checkpoint.is_some() {
                return Err(Failure::Usage("--checkpoint applies to brute mode only".into()));
            }
            let constraints = SearchConstraints::guided(max_vertices.unwrap_or(DEFAULT_GUARD));
            progress(c, || format!("guided search with vertex guard {}", constraints.max_vertices));
            guided_search_with(&constraints)?
        }
    };
    progress(c, || format!("finished in {} ms", result.elapsed_ms));

    let known: Vec<(&'static str, Graph)> = vec![("r1", atlas::r1()), ("r2", atlas::r2())];
    let known: Vec<(&'static str, usize, String)> = known
        .into_iter()
        .map(|(n, g)| (n, g.order(), canonical_form(&g).expect("small graph").to_string()))
        .collect();
    let limit = result.constraints.max_vertices;
    let expected: Vec<&'static str> = known.iter().filter(|k| k.1 <= limit).map(|k| k.0).collect();
    let found: Vec<FoundRow> = result
        .found
        .iter()
        .map(|f| FoundRow {
            form: f.form.to_string(),
            vertices: f.vertices,
            edges: f.edges,
            known: known.iter().find(|k| k.2 == f.form.as_str()).map(|k| k.0),
        })
        .collect();
    let mut names: Vec<&'static str> = found.iter().filter_map(|f| f.known).collect();
    names.sort_unstable();
    let matches_expected = found.iter().all(|f| f.known.is_some()) && names == expected;
    let body = SearchBody {
        constraints: result.constraints,
        complete: result.complete,
        found,
        expected,
        matches_expected,
        counters: result.counters,
        cases: result.cases,
        notes: result.notes,
        elapsed_ms: (!c.no_timestamp).then_some(result.elapsed_ms),
    };
    let args = format!("search {:?} {}", body.constraints.mode, body.constraints.hash());
    let text = match fmt {
        OutputFormat::Json => json_report(c, "search", &InputInfo::arguments(&args), &body),
        _ => {
            let mode = match body.constraints.mode {
                Mode::Brute => "brute",
                Mode::Guided => "guided",
            };
            let mut out = format!(
                "{mode} search, max vertices {}: {} graph(s) found, {}\n",
                body.constraints.max_vertices,
                body.found.len(),
                if body.complete { "complete" } else { "INCOMPLETE" }
            );
            let rows: Vec<Vec<String>> = body
                .found
                .iter()
                .map(|f| {
                    vec![f.form.clone(), f.vertices.to_string(), f.edges.to_string(), f.known.unwrap_or("new").into()]
                })
                .collect();
            if !rows.is_empty() {
                out.push_str(&table(&["graph6", "n", "m", "known"], &rows));
            }
            for case in &body.cases {
                out.push_str(&format!(
                    "case {} {:?}: {} completion(s), {} dead end(s), {} guard hit(s)\n",
                    case.case,
                    case.degrees,
                    case.completions.len(),
                    case.dead_ends,
                    case.guard_hits
                ));
            }
            out.push_str(&format!(
                "matches known graphs {:?}: {}\n",
                body.expected,
                if body.matches_expected { "yes" } else { "NO" }
            ));
            for n in &body.notes {
                out.push_str(&format!("note: {n}\n"));
            }
            out
        }
    };
    emit(&text, None)?;
    Ok(if body.complete && body.matches_expected { 0 } else { 1 })
}
