//! Bitmask graph state shared by the search strategies.

use crate::canon::{canonize, Canonical};
use crate::cycles::four_cycles;
use crate::graph::Graph;
use crate::local::{FOUR_CYCLE_DEGREES, NO_FOUR_CYCLE_DEGREES};

pub(crate) const MAXN: usize = 32;

pub(crate) fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

/// A connected triangle-free graph as adjacency masks, with the 4-cycle
/// membership of each vertex (`cyc[v] = 0` off every 4-cycle, otherwise a
/// 1-based cycle id). Cycle ids are only meaningful while 4-cycles are
/// vertex-disjoint; `has_c4` is tracked regardless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Node {
    pub n: usize,
    pub adj: [u32; MAXN],
    pub cyc: [u8; MAXN],
    pub cycles: u8,
    pub has_c4: bool,
}

impl Node {
    pub fn single() -> Self {
        Node { n: 1, adj: [0; MAXN], cyc: [0; MAXN], cycles: 0, has_c4: false }
    }

    pub fn from_graph(g: &Graph) -> Self {
        let mut node = Node { n: g.order(), adj: [0; MAXN], cyc: [0; MAXN], cycles: 0, has_c4: false };
        for (u, row) in g.to_masks().expect("search graphs are small").into_iter().enumerate() {
            node.adj[u] = row;
        }
        for c in four_cycles(g) {
            node.has_c4 = true;
            node.cycles += 1;
            for v in c {
                node.cyc[v] = node.cycles;
            }
        }
        node
    }

    pub fn graph(&self) -> Graph {
        Graph::from_masks(&self.adj[..self.n])
    }

    pub fn deg(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn cyc_mask(&self) -> u32 {
        (0..self.n).filter(|&v| self.cyc[v] != 0).fold(0, |m, v| m | (1 << v))
    }

    pub fn canonize(&self) -> Canonical {
        canonize(&self.adj[..self.n], None)
    }

    /// Vertices whose removal leaves the graph connected.
    pub fn non_cut_mask(&self) -> u32 {
        let n = self.n;
        let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
        let mut out = 0;
        for u in 0..n {
            let rest = full & !(1 << u);
            if rest == 0 {
                out |= 1 << u;
                continue;
            }
            let mut seen = 1u32 << rest.trailing_zeros();
            let mut frontier = seen;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |m, w| m | self.adj[w]) & rest & !seen;
                seen |= next;
                frontier = next;
            }
            if seen == rest {
                out |= 1 << u;
            }
        }
        out
    }

    /// Appends vertex `n` adjacent to `s`. The caller has checked that `s`
    /// is independent and respects the degree cap; `new_cycle` is the one
    /// 4-cycle the extension closes, if any.
    pub fn extend(&self, s: u32, new_cycles: u32, new_cycle: Option<[usize; 3]>) -> Node {
        let v = self.n;
        let mut child = self.clone();
        child.n += 1;
        child.adj[v] = s;
        for a in bits(s) {
            child.adj[a] |= 1 << v;
        }
        if new_cycles > 0 {
            child.has_c4 = true;
        }
        if let Some(c) = new_cycle {
            child.cycles += 1;
            for w in c.into_iter().chain([v]) {
                child.cyc[w] = child.cycles;
            }
        }
        child
    }

    fn on_cycle(&self, u: usize, v: usize) -> bool {
        self.cyc[u] != 0 && self.cyc[u] == self.cyc[v]
    }

    /// Degree-pair filter plus the no-4-cycle-edge conditions, on masks.
    /// Assumes triangle-free with vertex-disjoint 4-cycles.
    pub fn passes_lemma_filters(&self) -> bool {
        for x in 0..self.n {
            for y in bits(self.adj[x]).filter(|&y| y > x) {
                let ok = if self.on_cycle(x, y) {
                    let (a, b) = sorted(self.deg(x), self.deg(y));
                    FOUR_CYCLE_DEGREES.contains(&(a, b))
                } else {
                    self.lemma2_ok(x, y)
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    pub fn lemma2_ok(&self, x: usize, y: usize) -> bool {
        lemma2_ok(&self.adj, x, y)
    }
}

/// Mask version of the no-4-cycle-edge classifier: true unless it would
/// report a violation. Assumes `xy` lies on no 3- or 4-cycle.
pub(crate) fn lemma2_ok(adj: &[u32], x: usize, y: usize) -> bool {
    let deg = |v: usize| adj[v].count_ones() as usize;
    let (x, y) = if deg(x) <= deg(y) { (x, y) } else { (y, x) };
    let (dx, dy) = (deg(x), deg(y));
    if !NO_FOUR_CYCLE_DEGREES.contains(&(dx, dy)) {
        return false;
    }
    let xs = adj[x] & !(1 << y);
    let ys = adj[y] & !(1 << x);
    match (dx, dy) {
        (2, 2) | (3, 3) => {
            let five: u32 = bits(xs)
                .flat_map(|a| bits(ys).map(move |c| (a, c)))
                .map(|(a, c)| (adj[a] & adj[c]).count_ones())
                .sum();
            if dx == 2 {
                five == 0
            } else {
                five >= 2
            }
        }
        _ => {
            let x1 = xs.trailing_zeros() as usize;
            let near = bits(ys).filter(|&c| adj[x1] & adj[c] != 0).count();
            if dy == 3 {
                near == 1
            } else {
                near >= 2
            }
        }
    }
}

fn sorted(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}
