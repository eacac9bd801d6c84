//! Graph file formats: edgelist, graph6 and DOT (export only).
//!
//! Edgelist: a header line `n m`, then `m` lines `u v`, whitespace separated.
//! Serialization writes `u < v`, edges sorted, LF line endings. Parsing also
//! accepts `u > v`, blank lines and `#` comment lines.
//!
//! graph6: the standard ASCII encoding. `N(n)` is one byte `n + 63` for
//! `n <= 62`, otherwise `~` followed by three 6-bit big-endian groups (each
//! `+ 63`). The upper triangle is read column by column (`x(0,1)`, `x(0,2)`,
//! `x(1,2)`, `x(0,3)`, ...), packed six bits per byte, most significant bit
//! first, zero padded, and each byte offset by 63.

use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Edgelist,
    Graph6,
    Dot,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edgelist" => Ok(Self::Edgelist),
            "graph6" | "g6" => Ok(Self::Graph6),
            "dot" => Ok(Self::Dot),
            other => Err(format!("unknown graph format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: malformed edge: {text}")]
    MalformedEdge { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("header promises {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("invalid graph6 data: {0}")]
    InvalidGraph6(String),
    #[error("DOT is an export-only format")]
    ExportOnly,
    #[error("input is not valid UTF-8")]
    NotUtf8,
}

pub fn parse_graph(bytes: &[u8], format: GraphFormat) -> Result<Graph, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::NotUtf8)?;
    match format {
        GraphFormat::Edgelist => parse_edgelist(text),
        GraphFormat::Graph6 => parse_graph6(text),
        GraphFormat::Dot => Err(ParseError::ExportOnly),
    }
}

pub fn serialize_graph(g: &Graph, format: GraphFormat) -> Vec<u8> {
    match format {
        GraphFormat::Edgelist => to_edgelist(g),
        GraphFormat::Graph6 => {
            let mut s = to_graph6(g);
            s.push('\n');
            s
        }
        GraphFormat::Dot => to_dot(g),
    }
    .into_bytes()
}

pub fn parse_edgelist(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::MalformedHeader("empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m] = fields[..] else {
        return Err(ParseError::MalformedHeader(header.to_string()));
    };
    let parse_count = |s: &str| s.parse::<usize>().map_err(|_| ParseError::MalformedHeader(header.to_string()));
    let (n, m) = (parse_count(n)?, parse_count(m)?);

    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let parsed = match fields[..] {
            [u, v] => u.parse::<usize>().ok().zip(v.parse::<usize>().ok()),
            _ => None,
        };
        let (u, v) = parsed.ok_or_else(|| ParseError::MalformedEdge { line, text: text.to_string() })?;
        for vertex in [u, v] {
            if vertex >= n {
                return Err(ParseError::VertexOutOfRange { line, vertex, n });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, vertex: u });
        }
        let (a, b) = (u.min(v), u.max(v));
        if !seen.insert((a, b)) {
            return Err(ParseError::DuplicateEdge { line, u: a, v: b });
        }
        edges.push((a, b));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found: edges.len() });
    }
    Ok(Graph::new(n, edges).expect("validated above"))
}

pub fn to_edgelist(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.order(), g.size());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses the first graph6 record (an optional `>>graph6<<` header is skipped).
pub fn parse_graph6(text: &str) -> Result<Graph, ParseError> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| ParseError::InvalidGraph6("empty input".into()))?;
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(ParseError::InvalidGraph6(format!("byte {b} outside 63..=126")));
    }
    let (n, rest) = match bytes {
        [] => return Err(ParseError::InvalidGraph6("empty record".into())),
        [126, 126, ..] => return Err(ParseError::InvalidGraph6("graphs above 258047 vertices are not supported".into())),
        [126, a, b, c, rest @ ..] => {
            let n = ((*a as usize - 63) << 12) | ((*b as usize - 63) << 6) | (*c as usize - 63);
            (n, rest)
        }
        [126, ..] => return Err(ParseError::InvalidGraph6("truncated size field".into())),
        [a, rest @ ..] => (*a as usize - 63, rest),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let needed = bits.div_ceil(6);
    if rest.len() != needed {
        return Err(ParseError::InvalidGraph6(format!(
            "expected {needed} data bytes for n = {n}, found {}",
            rest.len()
        )));
    }
    let bit = |k: usize| ((rest[k / 6] - 63) >> (5 - k % 6)) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if bits % 6 != 0 && (bits..needed * 6).any(bit) {
        return Err(ParseError::InvalidGraph6("nonzero padding bits".into()));
    }
    Graph::new(n, edges).map_err(|e: GraphError| ParseError::InvalidGraph6(e.to_string()))
}

fn graph6_size_prefix(n: usize, out: &mut String) {
    if n <= 62 {
        out.push((n as u8 + 63) as char);
    } else {
        out.push('~');
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    }
}

fn graph6_pack(n: usize, adjacent: impl Fn(usize, usize) -> bool, out: &mut String) {
    let mut acc = 0u8;
    let mut count = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | adjacent(i, j) as u8;
            count += 1;
            if count == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                count = 0;
            }
        }
    }
    if count > 0 {
        out.push(((acc << (6 - count)) + 63) as char);
    }
}

pub fn to_graph6(g: &Graph) -> String {
    let mut out = String::new();
    graph6_size_prefix(g.order(), &mut out);
    graph6_pack(g.order(), |i, j| g.has_edge(i, j), &mut out);
    out
}

/// graph6 encoding straight from bitmask rows.
pub fn graph6_from_masks(rows: &[u32]) -> String {
    let mut out = String::new();
    graph6_size_prefix(rows.len(), &mut out);
    graph6_pack(rows.len(), |i, j| rows[j] >> i & 1 == 1, &mut out);
    out
}

pub fn to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.order() {
        out.push_str(&format!("  {v};\n"));
    }
    for &(u, v) in g.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}
