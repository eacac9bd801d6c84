//! Named graphs and families with fixed labelings.
//!
//! | name | labeling |
//! |------|----------|
//! | `cycle(n)` | `i ~ i+1 mod n` |
//! | `path(n)` | `i ~ i+1` |
//! | `complete(n)` | all pairs |
//! | `petersen` | outer 5-cycle `0..5`, spokes `i ~ i+5`, inner pentagram `5+i ~ 5+(i+2 mod 5)` |
//! | `dodecahedral` | pentagon `a_i = i`, `b_i = 5+i ~ a_i`, `c_i = 10+i ~ b_i, b_{i+1}`, `d_i = 15+i ~ c_i`, pentagon on `d` |
//! | `half_dodecahedral` | the `a`, `b`, `c` layers of `dodecahedral` (15 vertices) |
//! | `r1` | outer square `0..4`, hubs `4` and `5`, bridges `6..14` |
//! | `r2` | squares `0–1–2–3` and `4–5–7–6`, see [`r2`] |
//! | `diamond_necklace(k)` | junction `j_i = 3i`, tips `t_i = 3i+1`, `b_i = 3i+2` |

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curvature::{is_ricci_flat, ricci_curvature, CurvatureError};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("unknown graph name {0:?}")]
    UnknownName(String),
    #[error("{name} needs a parameter")]
    MissingParameter { name: String },
    #[error("{name} takes no parameter")]
    UnexpectedParameter { name: String },
    #[error("{name}({parameter}) is below the minimum {minimum}")]
    ParameterTooSmall { name: String, parameter: usize, minimum: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Flat,
    NotFlat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasEntry {
    pub name: String,
    pub parameter: Option<usize>,
    #[serde(skip)]
    pub graph: Graph,
    pub expected_flat: Expectation,
    pub note: &'static str,
}

/// Names accepted by [`named_graph`], with the minimum parameter for
/// parametrized families.
pub const NAMES: [(&str, Option<usize>); 9] = [
    ("cycle", Some(3)),
    ("path", Some(2)),
    ("complete", Some(2)),
    ("petersen", None),
    ("dodecahedral", None),
    ("half_dodecahedral", None),
    ("r1", None),
    ("r2", None),
    ("diamond_necklace", Some(3)),
];

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    Graph::new(n, edges).expect("generator edge lists are simple")
}

pub fn cycle(n: usize) -> Graph {
    build(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    build(10, outer.chain(spokes).chain(inner))
}

fn dodecahedral_layers(with_bottom: bool) -> Graph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..5 {
        let next = (i + 1) % 5;
        edges.push((i, next));
        edges.push((i, 5 + i));
        edges.push((5 + i, 10 + i));
        edges.push((5 + next, 10 + i));
        if with_bottom {
            edges.push((10 + i, 15 + i));
            edges.push((15 + i, 15 + next));
        }
    }
    build(if with_bottom { 20 } else { 15 }, edges)
}

pub fn dodecahedral() -> Graph {
    dodecahedral_layers(true)
}

pub fn half_dodecahedral() -> Graph {
    dodecahedral_layers(false)
}

/// Square `0–1–2–3`; hub `4` reaches the corners through bridges
/// `6, 8, 10, 12` and hub `5` through `7, 9, 11, 13`.
pub fn r1() -> Graph {
    build(
        14,
        [
            (0, 1), (1, 2), (2, 3), (0, 3),
            (3, 6), (4, 6), (2, 8), (4, 8), (1, 10), (4, 10), (0, 12), (4, 12),
            (3, 7), (5, 7), (2, 9), (5, 9), (1, 11), (5, 11), (0, 13), (5, 13),
        ],
    )
}

/// Squares `0–1–2–3` and `4–5–7–6`, joined through `3–4`, `1–7`, the
/// bridges `8` (to `0`, `6`), `9` (to `0`, `5`), `10` (to `2`, `6`) and `11`
/// (to `2`, `5`).
pub fn r2() -> Graph {
    build(
        12,
        [
            (0, 1), (1, 2), (0, 3), (2, 3),
            (3, 4), (4, 5), (4, 6),
            (1, 7), (5, 7), (6, 7),
            (0, 8), (6, 8),
            (0, 9), (5, 9),
            (2, 10), (6, 10),
            (2, 11), (5, 11),
        ],
    )
}

pub fn diamond_necklace(k: usize) -> Graph {
    let j = |i: usize| 3 * (i % k);
    let edges = (0..k).flat_map(|i| {
        let (t, b) = (3 * i + 1, 3 * i + 2);
        [(j(i), t), (j(i), b), (t, j(i + 1)), (b, j(i + 1))]
    });
    build(3 * k, edges)
}

/// Looks up a named graph. Parametrized families require `parameter`.
pub fn named_graph(name: &str, parameter: Option<usize>) -> Result<AtlasEntry, AtlasError> {
    let name = name.replace('-', "_").to_ascii_lowercase();
    let (_, minimum) = NAMES.iter().find(|(n, _)| *n == name).ok_or_else(|| AtlasError::UnknownName(name.clone()))?;
    let p = match (minimum, parameter) {
        (Some(min), Some(p)) if p < *min => {
            return Err(AtlasError::ParameterTooSmall { name, parameter: p, minimum: *min });
        }
        (Some(_), Some(p)) => p,
        (Some(_), None) => return Err(AtlasError::MissingParameter { name }),
        (None, Some(_)) => return Err(AtlasError::UnexpectedParameter { name }),
        (None, None) => 0,
    };
    use Expectation::*;
    let (graph, expected_flat, note) = match name.as_str() {
        "cycle" => (cycle(p), if p >= 6 { Flat } else { NotFlat }, "cycles of length at least six are flat"),
        "path" => (path(p), Unknown, "finite stand-in for the infinite path; only interior edges are checked"),
        "complete" => (complete(p), NotFlat, "complete graphs have positive curvature"),
        "petersen" => (petersen(), Flat, "girth-five classification"),
        "dodecahedral" => (dodecahedral(), Flat, "girth-five classification"),
        "half_dodecahedral" => (
            half_dodecahedral(),
            Flat,
            "top half of the dodecahedral graph: a pentagon, its spokes and a 10-cycle of degree-2 and \
             degree-3 vertices; flat by direct computation",
        ),
        "r1" => (r1(), Flat, "girth-four classification, 14 vertices"),
        "r2" => (r2(), Flat, "girth-four classification, 12 vertices"),
        "diamond_necklace" => (diamond_necklace(p), Flat, "4-cycles sharing junction vertices"),
        _ => unreachable!(),
    };
    Ok(AtlasEntry { name, parameter: parameter.filter(|_| minimum.is_some()), graph, expected_flat, note })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasRow {
    pub name: String,
    pub parameter: Option<usize>,
    pub vertices: usize,
    pub edges: usize,
    pub expected_flat: Expectation,
    /// Edges whose curvature was computed.
    pub checked_edges: usize,
    /// Checked edges with `κ = 0`.
    pub flat_edges: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasReport {
    pub rows: Vec<AtlasRow>,
    pub passed: usize,
    pub total: usize,
}

/// Entries checked by [`verify_atlas`].
pub fn verification_entries() -> Vec<AtlasEntry> {
    let mut list: Vec<(&str, Option<usize>)> = vec![
        ("petersen", None),
        ("dodecahedral", None),
        ("half_dodecahedral", None),
        ("r1", None),
        ("r2", None),
    ];
    list.extend((3..=12).map(|n| ("cycle", Some(n))));
    list.push(("path", Some(12)));
    list.extend((2..=5).map(|n| ("complete", Some(n))));
    list.extend((3..=8).map(|k| ("diamond_necklace", Some(k))));
    list.into_iter().map(|(n, p)| named_graph(n, p).expect("built-in entry")).collect()
}

/// Interior edges of `path(n)`: both endpoints at distance at least two
/// from the ends.
pub fn path_interior_edges(n: usize) -> Vec<(usize, usize)> {
    (2..n.saturating_sub(3)).map(|i| (i, i + 1)).collect()
}

fn check_entry(entry: &AtlasEntry) -> Result<(usize, usize, bool), CurvatureError> {
    let g = &entry.graph;
    if entry.expected_flat == Expectation::Unknown {
        let edges = path_interior_edges(g.order());
        let mut flat = 0;
        for &(x, y) in &edges {
            if ricci_curvature(g, x, y)?.flat {
                flat += 1;
            }
        }
        return Ok((edges.len(), flat, flat == edges.len()));
    }
    let report = is_ricci_flat(g)?;
    let pass = report.is_ricci_flat == (entry.expected_flat == Expectation::Flat);
    Ok((report.edges.len(), report.flat_edges, pass))
}

/// Computes the curvature of every verification entry and compares
/// flatness with the expectation.
pub fn verify_atlas() -> AtlasReport {
    let rows: Vec<AtlasRow> = verification_entries()
        .par_iter()
        .map(|entry| {
            let base = AtlasRow {
                name: entry.name.clone(),
                parameter: entry.parameter,
                vertices: entry.graph.order(),
                edges: entry.graph.size(),
                expected_flat: entry.expected_flat,
                checked_edges: 0,
                flat_edges: 0,
                pass: false,
                error: None,
            };
            match check_entry(entry) {
                Ok((checked_edges, flat_edges, pass)) => AtlasRow { checked_edges, flat_edges, pass, ..base },
                Err(e) => AtlasRow { error: Some(e.to_string()), ..base },
            }
        })
        .collect();
    let passed = rows.iter().filter(|r| r.pass).count();
    AtlasReport { total: rows.len(), passed, rows }
}
