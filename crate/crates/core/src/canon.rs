//! Canonical labeling for small graphs.
//!
//! Colour refinement to an equitable partition, then individualization of
//! vertices in the first smallest non-singleton cell, recursively. Leaves are
//! compared by their relabeled adjacency rows and the least one wins.
//! Automorphisms discovered when two leaves coincide prune sibling branches
//! and yield the vertex orbits.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::format::graph6_from_masks;
use crate::graph::{Graph, GraphError};

/// Default vertex limit for canonical-form computations.
pub const DEFAULT_CANON_LIMIT: usize = 20;

/// Byte string identifying an isomorphism class: the graph6 encoding of the
/// canonically relabeled graph, followed by `:` and the colour sequence for
/// coloured inputs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn from_string(s: String) -> Self {
        CanonicalForm(s)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.0)
    }
}

/// Result of canonical labeling.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `labeling[v]` is the canonical label of vertex `v`.
    pub labeling: Vec<usize>,
    /// `orbits[v]` is the least vertex in the automorphism orbit of `v`.
    pub orbits: Vec<usize>,
    /// Automorphisms found during the search; they generate the group.
    pub generators: Vec<Vec<usize>>,
}

impl Canonical {
    /// Vertex that receives canonical label `label`.
    pub fn vertex_with_label(&self, label: usize) -> usize {
        self.labeling.iter().position(|&l| l == label).expect("label in range")
    }

    pub fn same_orbit(&self, u: usize, v: usize) -> bool {
        self.orbits[u] == self.orbits[v]
    }

    pub fn has_trivial_group(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Canonical form of `g`, refusing graphs above [`DEFAULT_CANON_LIMIT`] vertices.
pub fn canonical_form(g: &Graph) -> Result<CanonicalForm, GraphError> {
    canonical_form_with_limit(g, DEFAULT_CANON_LIMIT)
}

pub fn canonical_form_with_limit(g: &Graph, limit: usize) -> Result<CanonicalForm, GraphError> {
    Ok(canonize_graph(g, limit)?.form)
}

pub fn canonize_graph(g: &Graph, limit: usize) -> Result<Canonical, GraphError> {
    let limit = limit.min(32);
    if g.order() > limit {
        return Err(GraphError::TooLarge { n: g.order(), limit });
    }
    Ok(canonize(&g.to_masks()?, None))
}

/// Canonically labels the graph with bitmask rows `adj` (at most 32
/// vertices). Optional `colors` give an initial vertex partition; vertices
/// are only mapped onto vertices of equal colour.
pub fn canonize(adj: &[u32], colors: Option<&[u32]>) -> Canonical {
    let n = adj.len();
    assert!(n <= 32, "canonize supports at most 32 vertices");
    if n == 0 {
        return Canonical {
            form: CanonicalForm(graph6_from_masks(&[])),
            labeling: vec![],
            orbits: vec![],
            generators: vec![],
        };
    }
    let cells = initial_cells(n, colors);
    let mut search = Search { adj, n, first: None, best: None, generators: Vec::new() };
    let queue: VecDeque<u32> = cells.iter().copied().collect();
    search.descend(cells, queue, &mut Vec::new());

    let best = search.best.expect("at least one leaf");
    let mut form = graph6_from_masks(&best.rows);
    if let Some(colors) = colors {
        form.push(':');
        let seq: Vec<String> = best.order.iter().map(|&v| colors[v].to_string()).collect();
        form.push_str(&seq.join(","));
    }
    let orbits = orbits_of(n, &search.generators, &[]);
    Canonical {
        form: CanonicalForm(form),
        labeling: best.labeling,
        orbits,
        generators: search.generators,
    }
}

fn initial_cells(n: usize, colors: Option<&[u32]>) -> Vec<u32> {
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    match colors {
        None => vec![all],
        Some(colors) => {
            let mut values: Vec<u32> = colors.to_vec();
            values.sort_unstable();
            values.dedup();
            values
                .iter()
                .map(|&c| (0..n).filter(|&v| colors[v] == c).fold(0u32, |m, v| m | 1 << v))
                .collect()
        }
    }
}

struct Leaf {
    rows: Vec<u32>,
    order: Vec<usize>,
    labeling: Vec<usize>,
}

struct Search<'a> {
    adj: &'a [u32],
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, mut cells: Vec<u32>, queue: VecDeque<u32>, fixed: &mut Vec<usize>) {
        refine(self.adj, &mut cells, queue);
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.count_ones() > 1)
            .min_by_key(|(i, c)| (c.count_ones(), *i))
            .map(|(i, _)| i);
        let Some(t) = target else {
            self.leaf(&cells);
            return;
        };
        let cell = cells[t];
        let mut explored: Vec<usize> = Vec::new();
        let mut m = cell;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if !explored.is_empty() {
                let orbits = orbits_of(self.n, &self.generators, fixed);
                if explored.iter().any(|&w| orbits[w] == orbits[v]) {
                    continue;
                }
            }
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..t]);
            next.push(1 << v);
            next.push(cell & !(1 << v));
            next.extend_from_slice(&cells[t + 1..]);
            fixed.push(v);
            self.descend(next, VecDeque::from([1u32 << v]), fixed);
            fixed.pop();
            explored.push(v);
        }
    }

    fn leaf(&mut self, cells: &[u32]) {
        let order: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let mut labeling = vec![0; self.n];
        for (i, &v) in order.iter().enumerate() {
            labeling[v] = i;
        }
        let rows: Vec<u32> = order
            .iter()
            .map(|&u| {
                let mut r = 0u32;
                let mut m = self.adj[u];
                while m != 0 {
                    let w = m.trailing_zeros() as usize;
                    m &= m - 1;
                    r |= 1 << labeling[w];
                }
                r
            })
            .collect();
        let leaf = Leaf { rows, order, labeling };
        let Some(first) = &self.first else {
            self.first = Some(Leaf { rows: leaf.rows.clone(), order: leaf.order.clone(), labeling: leaf.labeling.clone() });
            self.best = Some(leaf);
            return;
        };
        if leaf.rows == first.rows {
            let gamma: Vec<usize> = (0..self.n).map(|v| first.order[leaf.labeling[v]]).collect();
            self.generators.push(gamma);
            return;
        }
        let best = self.best.as_ref().unwrap();
        match leaf.rows.cmp(&best.rows) {
            std::cmp::Ordering::Equal => {
                let gamma: Vec<usize> = (0..self.n).map(|v| best.order[leaf.labeling[v]]).collect();
                self.generators.push(gamma);
            }
            std::cmp::Ordering::Less => self.best = Some(leaf),
            std::cmp::Ordering::Greater => {}
        }
    }
}

/// Equitable refinement: splits cells by neighbour counts into splitter
/// cells until stable. New fragments are ordered by increasing count, which
/// keeps the result independent of the input labeling.
fn refine(adj: &[u32], cells: &mut Vec<u32>, mut queue: VecDeque<u32>) {
    let mut scratch: Vec<(u32, usize)> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut i = 0;
        while i < cells.len() {
            let c = cells[i];
            if c.count_ones() == 1 {
                i += 1;
                continue;
            }
            scratch.clear();
            let mut m = c;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                scratch.push(((adj[v] & s).count_ones(), v));
            }
            let first = scratch[0].0;
            if scratch.iter().all(|&(k, _)| k == first) {
                i += 1;
                continue;
            }
            scratch.sort_unstable();
            let mut parts: Vec<u32> = Vec::new();
            let mut last = u32::MAX;
            for &(k, v) in &scratch {
                if k != last {
                    parts.push(0);
                    last = k;
                }
                *parts.last_mut().unwrap() |= 1 << v;
            }
            let np = parts.len();
            cells.splice(i..=i, parts.iter().copied());
            queue.extend(parts);
            i += np;
        }
    }
}

/// Orbit representatives (least vertex) under the group generated by the
/// generators that fix every vertex of `fixed`.
fn orbits_of(n: usize, generators: &[Vec<usize>], fixed: &[usize]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in generators {
        if fixed.iter().any(|&f| g[f] != f) {
            continue;
        }
        for v in 0..n {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}
