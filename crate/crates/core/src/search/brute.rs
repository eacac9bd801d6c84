//! Exhaustive isomorph-free enumeration by canonical vertex addition.
//!
//! Every node of the tree is a connected triangle-free graph with maximum
//! degree at most the cap (and vertex-disjoint 4-cycles when required). All
//! of these properties survive deleting a non-cut vertex, so every such graph
//! arises from a smaller one by adding a vertex. A child is kept only when the
//! added vertex lies in the automorphism orbit of the child's canonical
//! deletion vertex: among non-cut vertices of least `(degree, sum of neighbor
//! degrees)`, the one with the largest canonical label.
//!
//! The tree is cut at a fixed order into subtrees that run as independent
//! tasks. Task roots double as the checkpoint frontier.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use super::checkpoint::Checkpoint;
use super::masks::{bits, Node};
use super::{collect_found, reverify, standard_notes, Counters, Mode, SearchConstraints, SearchError, SearchResult};
use crate::canon::CanonicalForm;
use crate::curvature::all_edges_flat;
use crate::format::to_graph6;
use crate::graph::Graph;

/// Order at which the tree is cut into tasks.
pub const SPLIT_ORDER: usize = 8;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the current rayon pool.
    pub jobs: Option<usize>,
    /// Progress is written here after every batch of tasks, and a run
    /// resumes from it when the file already exists.
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many tasks have finished (used to test resumption).
    pub stop_after_tasks: Option<usize>,
}

/// Per-task accumulator.
#[derive(Default)]
struct Acc {
    counters: Counters,
    found: Vec<CanonicalForm>,
    error: Option<SearchError>,
}

impl Acc {
    fn merge(&mut self, o: Acc) {
        self.counters += &o.counters;
        self.found.extend(o.found);
        if self.error.is_none() {
            self.error = o.error;
        }
    }
}

struct Explorer<'a> {
    c: &'a SearchConstraints,
}

impl Explorer<'_> {
    /// Applies the candidate filters to one accepted graph.
    fn examine(&self, node: &Node, acc: &mut Acc) {
        let k = &mut acc.counters;
        k.generated += 1;
        if k.generated_by_order.len() <= node.n {
            k.generated_by_order.resize(node.n + 1, 0);
        }
        k.generated_by_order[node.n] += 1;
        if !node.has_c4 {
            k.filtered_girth += 1;
            return;
        }
        if self.c.lemma_filters && self.c.require_vertex_disjoint_4cycles && !node.passes_lemma_filters() {
            k.filtered_lemma += 1;
            return;
        }
        // Isolated vertices only occur in the one-vertex root, which has no 4-cycle.
        k.curvature_evaluations += 1;
        let g = node.graph();
        match all_edges_flat(&g) {
            Ok(true) => acc.found.push(node.canonize().form),
            Ok(false) => {}
            Err(e) => acc.error = Some(e.into()),
        }
    }

    /// Accepted children of `node`, in a fixed order.
    fn children(&self, node: &Node, acc: &mut Acc) -> Vec<Node> {
        let c = self.c;
        let n = node.n;
        if n >= c.max_vertices {
            return Vec::new();
        }
        let eligible: Vec<usize> = (0..n).filter(|&v| node.deg(v) < c.degree_cap).collect();
        let cyc_mask = node.cyc_mask();
        let symmetric = n > 1 && !node.canonize().has_trivial_group();
        let mut seen: HashSet<CanonicalForm> = HashSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.subsets(node, &eligible, 0, 0, &mut stack, cyc_mask, symmetric, &mut seen, &mut out, acc);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn subsets(
        &self,
        node: &Node,
        eligible: &[usize],
        start: usize,
        s: u32,
        stack: &mut Vec<usize>,
        cyc_mask: u32,
        symmetric: bool,
        seen: &mut HashSet<CanonicalForm>,
        out: &mut Vec<Node>,
        acc: &mut Acc,
    ) {
        if s != 0 {
            self.try_child(node, s, cyc_mask, symmetric, seen, out, acc);
        }
        if stack.len() == self.c.degree_cap {
            return;
        }
        for i in start..eligible.len() {
            let a = eligible[i];
            if node.adj[a] & s != 0 {
                acc.counters.pruned_triangle += 1;
                continue;
            }
            stack.push(a);
            self.subsets(node, eligible, i + 1, s | (1 << a), stack, cyc_mask, symmetric, seen, out, acc);
            stack.pop();
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn try_child(
        &self,
        node: &Node,
        s: u32,
        cyc_mask: u32,
        symmetric: bool,
        seen: &mut HashSet<CanonicalForm>,
        out: &mut Vec<Node>,
        acc: &mut Acc,
    ) {
        // New 4-cycles are v–a–w–b for a, b in S and w a common neighbor.
        let mut new_cycles = 0u32;
        let mut cycle = None;
        let members: Vec<usize> = bits(s).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let common = node.adj[a] & node.adj[b];
                new_cycles += common.count_ones();
                if common != 0 {
                    cycle = Some([a, common.trailing_zeros() as usize, b]);
                }
            }
        }
        if self.c.require_vertex_disjoint_4cycles && new_cycles > 0 {
            let [a, w, b] = cycle.unwrap();
            if new_cycles > 1 || cyc_mask & ((1 << a) | (1 << w) | (1 << b)) != 0 {
                acc.counters.pruned_four_cycle_overlap += 1;
                return;
            }
        }
        let tracked = if self.c.require_vertex_disjoint_4cycles { cycle } else { None };
        let child = node.extend(s, new_cycles, tracked);
        let v = node.n;
        let form = match accept(&child, v) {
            Acceptance::Reject => {
                acc.counters.pruned_noncanonical += 1;
                return;
            }
            Acceptance::Accept(form) => form,
        };
        if symmetric {
            let form = form.unwrap_or_else(|| child.canonize().form);
            if !seen.insert(form) {
                acc.counters.pruned_duplicate_sibling += 1;
                return;
            }
        }
        out.push(child);
    }

    fn explore(&self, node: &Node, acc: &mut Acc) {
        self.examine(node, acc);
        for child in self.children(node, acc) {
            self.explore(&child, acc);
        }
    }

    /// Explores down to `SPLIT_ORDER`, returning the task roots found there.
    fn shallow(&self, node: &Node, acc: &mut Acc, roots: &mut Vec<Node>) {
        if node.n == SPLIT_ORDER.min(self.c.max_vertices) && node.n > 1 {
            roots.push(node.clone());
            return;
        }
        self.examine(node, acc);
        for child in self.children(node, acc) {
            self.shallow(&child, acc, roots);
        }
    }
}

enum Acceptance {
    Reject,
    /// Accepted; carries the canonical form when one was computed.
    Accept(Option<CanonicalForm>),
}

/// Canonical deletion test for the last vertex `v` of `child`.
fn accept(child: &Node, v: usize) -> Acceptance {
    let inv = |u: usize| (child.deg(u), bits(child.adj[u]).map(|w| child.deg(w)).sum::<usize>());
    let non_cut = child.non_cut_mask();
    let best = bits(non_cut).map(inv).min().expect("every connected graph has a non-cut vertex");
    let candidates: u32 = bits(non_cut).filter(|&u| inv(u) == best).fold(0, |m, u| m | (1 << u));
    if candidates & (1 << v) == 0 {
        return Acceptance::Reject;
    }
    if candidates == 1 << v {
        return Acceptance::Accept(None);
    }
    let canon = child.canonize();
    let chosen = bits(candidates).max_by_key(|&u| canon.labeling[u]).unwrap();
    if canon.same_orbit(v, chosen) {
        Acceptance::Accept(Some(canon.form))
    } else {
        Acceptance::Reject
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Runs or resumes a brute-force search.
pub fn run(c: &SearchConstraints, opts: &RunOptions) -> Result<SearchResult, SearchError> {
    let mut c = c.clone();
    c.mode = Mode::Brute;
    c.validate()?;
    let start = Instant::now();
    let explorer = Explorer { c: &c };

    let existing = match &opts.checkpoint {
        Some(p) if p.exists() => Some(Checkpoint::load(p)?),
        _ => None,
    };
    let mut state = match existing {
        Some(cp) => {
            cp.check_constraints(&c)?;
            cp
        }
        None => {
            let mut acc = Acc::default();
            let mut roots = Vec::new();
            explorer.shallow(&Node::single(), &mut acc, &mut roots);
            if let Some(e) = acc.error {
                return Err(e);
            }
            Checkpoint::new(&c, roots.iter().map(|r| to_graph6(&r.graph())).collect(), acc.found, acc.counters)
        }
    };

    let batch = opts.jobs.unwrap_or_else(rayon::current_num_threads).max(1) * 8;
    let mut finished = 0usize;
    loop {
        if let Some(p) = &opts.checkpoint {
            state.save(p)?;
        }
        if state.pending.is_empty() {
            break;
        }
        if opts.stop_after_tasks.is_some_and(|s| finished >= s) {
            break;
        }
        let mut take = batch.min(state.pending.len());
        if let Some(s) = opts.stop_after_tasks {
            take = take.min(s - finished);
        }
        let tasks: Vec<String> = state.pending.drain(..take).collect();
        let roots: Vec<Node> = tasks
            .iter()
            .map(|g6| crate::format::parse_graph6(g6).map(|g| Node::from_graph(&g)))
            .collect::<Result<_, _>>()?;
        let results: Vec<Acc> = with_pool(opts.jobs, || {
            roots
                .par_iter()
                .map(|root| {
                    let mut acc = Acc::default();
                    explorer.explore(root, &mut acc);
                    acc
                })
                .collect()
        });
        let mut merged = Acc::default();
        for r in results {
            merged.merge(r);
        }
        if let Some(e) = merged.error {
            return Err(e);
        }
        state.record(merged.found, &merged.counters, take as u64);
        finished += take;
    }

    let found = collect_found(state.found.iter().cloned())?;
    for f in &found {
        reverify(f, &c)?;
    }
    Ok(SearchResult {
        notes: standard_notes(&c),
        constraints: c,
        found,
        counters: state.counters.clone(),
        complete: state.pending.is_empty(),
        elapsed_ms: start.elapsed().as_millis(),
        cases: Vec::new(),
    })
}

/// Every connected triangle-free graph with maximum degree at most `cap` and
/// at most `max_n` vertices, one per isomorphism class, grouped by order.
/// Brute force: extends every graph of the previous order in every way and
/// deduplicates with a global set of canonical forms.
pub fn naive_connected_triangle_free(max_n: usize, cap: usize) -> Vec<Vec<Graph>> {
    let mut levels: Vec<Vec<Graph>> = vec![Vec::new(), vec![Graph::empty(1)]];
    for n in 2..=max_n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &levels[n - 1] {
            for s in 1u32..(1 << (n - 1)) {
                let members: Vec<usize> = bits(s).collect();
                if members.iter().any(|&a| g.degree(a) >= cap) || members.len() > cap {
                    continue;
                }
                if members.iter().any(|&a| members.iter().any(|&b| g.has_edge(a, b))) {
                    continue;
                }
                let mut edges = g.edges().to_vec();
                edges.extend(members.iter().map(|&a| (a, n - 1)));
                let h = Graph::new(n, edges).unwrap();
                let form = crate::canon::canonical_form(&h).unwrap();
                if seen.insert(form) {
                    next.push(h);
                }
            }
        }
        levels.push(next);
    }
    levels
}
