//! Girth and 4-cycle catalogs.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::graph::Graph;

/// Girth and the complete list of 4-cycles of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCatalog {
    /// Length of a shortest cycle; `None` for forests.
    pub girth: Option<usize>,
    /// Every 4-cycle once, as its lexicographically least rotation/reflection.
    pub four_cycles: Vec<[usize; 4]>,
}

impl CycleCatalog {
    pub fn is_acyclic(&self) -> bool {
        self.girth.is_none()
    }
}

/// Exact girth via a breadth-first search from every vertex.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.order();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for s in 0..n {
        dist.fill(usize::MAX);
        parent.fill(usize::MAX);
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if best.is_some_and(|b| 2 * dist[u] + 1 >= b) {
                break;
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Rotates/reflects a cyclically ordered quadruple to its least form.
pub fn normalize_cycle(c: [usize; 4]) -> [usize; 4] {
    let mut best = c;
    for r in 0..4 {
        let rot = [c[r], c[(r + 1) % 4], c[(r + 2) % 4], c[(r + 3) % 4]];
        let refl = [rot[0], rot[3], rot[2], rot[1]];
        best = best.min(rot).min(refl);
    }
    best
}

/// All 4-cycles, each listed once in normalized form, sorted.
pub fn four_cycles(g: &Graph) -> Vec<[usize; 4]> {
    let n = g.order();
    let mut found = BTreeSet::new();
    for a in 0..n {
        for c in (a + 1)..n {
            let common: Vec<usize> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&w| g.has_edge(c, w))
                .collect();
            for (i, &b) in common.iter().enumerate() {
                for &d in &common[i + 1..] {
                    found.insert(normalize_cycle([a, b, c, d]));
                }
            }
        }
    }
    found.into_iter().collect()
}

pub fn girth_and_cycles(g: &Graph) -> CycleCatalog {
    CycleCatalog { girth: girth(g), four_cycles: four_cycles(g) }
}

fn cycle_edges(c: &[usize; 4]) -> [(usize, usize); 4] {
    let e = |u: usize, v: usize| (u.min(v), u.max(v));
    [e(c[0], c[1]), e(c[1], c[2]), e(c[2], c[3]), e(c[3], c[0])]
}

/// True iff no vertex lies on two distinct 4-cycles.
pub fn four_cycles_vertex_disjoint(g: &Graph) -> bool {
    let mut seen = vec![false; g.order()];
    for c in four_cycles(g) {
        for v in c {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
    }
    true
}

/// True iff no edge lies on two distinct 4-cycles.
pub fn four_cycles_edge_disjoint(g: &Graph) -> bool {
    let mut seen = BTreeSet::new();
    four_cycles(g)
        .iter()
        .flat_map(cycle_edges)
        .all(|e| seen.insert(e))
}

/// Brute-force enumeration of all simple cycles, as sorted-rotation vertex
/// lists. Exponential; intended for small graphs and test oracles.
pub fn all_simple_cycles(g: &Graph, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(g: &Graph, path: &mut Vec<usize>, on_path: &mut [bool], max_len: usize, out: &mut Vec<Vec<usize>>) {
        let start = path[0];
        let last = *path.last().unwrap();
        for &w in g.neighbors(last) {
            if w == start && path.len() >= 3 && path[1] < last {
                out.push(path.clone());
            }
            if w > start && !on_path[w] && path.len() < max_len {
                on_path[w] = true;
                path.push(w);
                extend(g, path, on_path, max_len, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; g.order()];
    for s in 0..g.order() {
        on_path[s] = true;
        let mut path = vec![s];
        extend(g, &mut path, &mut on_path, max_len, &mut out);
        on_path[s] = false;
    }
    out
}
