//! Searches for Ricci-flat graphs of girth four whose 4-cycles are
//! vertex-disjoint.
//!
//! [`brute`] enumerates every connected triangle-free graph with bounded
//! degree up to a vertex limit, one graph per isomorphism class, and filters
//! the results. [`guided`] grows graphs outward from a single seeded 4-cycle
//! and only keeps branches whose finished edges are locally compatible with
//! flatness.

pub mod brute;
pub mod checkpoint;
pub mod guided;
pub(crate) mod masks;

use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::CanonicalForm;
use crate::curvature::{is_ricci_flat, CurvatureError};
use crate::cycles::{four_cycles_vertex_disjoint, girth};
use crate::format::{parse_graph6, ParseError};
use crate::graph::Graph;

/// Largest vertex count brute mode accepts.
pub const BRUTE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Brute,
    Guided,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Mode::Brute),
            "guided" => Ok(Mode::Guided),
            _ => Err(format!("unknown mode {s:?} (expected brute or guided)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConstraints {
    pub max_vertices: usize,
    pub girth_exact: usize,
    pub require_vertex_disjoint_4cycles: bool,
    pub degree_cap: usize,
    pub mode: Mode,
    /// Discard candidates whose edge degrees rule out `κ = 0` before any
    /// curvature is computed. Turning this off only costs time.
    pub lemma_filters: bool,
}

impl Default for SearchConstraints {
    fn default() -> Self {
        SearchConstraints {
            max_vertices: 12,
            girth_exact: 4,
            require_vertex_disjoint_4cycles: true,
            degree_cap: 4,
            mode: Mode::Brute,
            lemma_filters: true,
        }
    }
}

impl SearchConstraints {
    pub fn brute(max_vertices: usize) -> Self {
        SearchConstraints { max_vertices, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.girth_exact != 4 {
            return Err(SearchError::Constraint(format!("girth must be 4, got {}", self.girth_exact)));
        }
        if self.degree_cap < 2 {
            return Err(SearchError::Constraint(format!("degree cap must be at least 2, got {}", self.degree_cap)));
        }
        if self.mode == Mode::Brute && self.max_vertices > BRUTE_LIMIT {
            return Err(SearchError::ResourceGuard(format!(
                "brute mode is limited to {BRUTE_LIMIT} vertices, got {}",
                self.max_vertices
            )));
        }
        if self.mode == Mode::Brute && self.degree_cap > BRUTE_LIMIT {
            return Err(SearchError::Constraint(format!("degree cap {} exceeds the vertex limit", self.degree_cap)));
        }
        Ok(())
    }

    /// SHA-256 over the fields that determine the enumeration tree.
    pub fn hash(&self) -> String {
        let key = format!(
            "v{}|n{}|g{}|d{}|c{}|l{}",
            checkpoint::VERSION,
            self.max_vertices,
            self.girth_exact,
            self.require_vertex_disjoint_4cycles,
            self.degree_cap,
            self.lemma_filters
        );
        let digest = Sha256::digest(key.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("invalid constraints: {0}")]
    Constraint(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("checkpoint was written for different constraints (hash {found}, expected {expected})")]
    HashMismatch { expected: String, found: String },
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("found graph failed re-verification: {0}")]
    Reverification(String),
}

impl From<ParseError> for SearchError {
    fn from(e: ParseError) -> Self {
        SearchError::CorruptCheckpoint(e.to_string())
    }
}

/// Work and pruning statistics. All counts are independent of the number of
/// workers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Graphs accepted into the enumeration, one per isomorphism class.
    pub generated: u64,
    /// `generated` split by vertex count.
    pub generated_by_order: Vec<u64>,
    /// Extensions rejected because the new vertex closes a triangle.
    pub pruned_triangle: u64,
    /// Extensions rejected because a new 4-cycle meets an existing one.
    pub pruned_four_cycle_overlap: u64,
    /// Extensions rejected because the new vertex is not the canonical one.
    pub pruned_noncanonical: u64,
    /// Isomorphic siblings dropped under a symmetric parent.
    pub pruned_duplicate_sibling: u64,
    /// Candidates without a 4-cycle.
    pub filtered_girth: u64,
    /// Candidates rejected by the degree-pair and no-4-cycle-edge filters.
    pub filtered_lemma: u64,
    /// Candidates whose curvature was computed.
    pub curvature_evaluations: u64,
    /// Branches abandoned by the guided search.
    pub guided_dead_ends: u64,
    /// Guided branches that hit the vertex guard.
    pub guard_hits: u64,
}

impl AddAssign<&Counters> for Counters {
    fn add_assign(&mut self, o: &Counters) {
        self.generated += o.generated;
        if self.generated_by_order.len() < o.generated_by_order.len() {
            self.generated_by_order.resize(o.generated_by_order.len(), 0);
        }
        for (a, b) in self.generated_by_order.iter_mut().zip(&o.generated_by_order) {
            *a += b;
        }
        self.pruned_triangle += o.pruned_triangle;
        self.pruned_four_cycle_overlap += o.pruned_four_cycle_overlap;
        self.pruned_noncanonical += o.pruned_noncanonical;
        self.pruned_duplicate_sibling += o.pruned_duplicate_sibling;
        self.filtered_girth += o.filtered_girth;
        self.filtered_lemma += o.filtered_lemma;
        self.curvature_evaluations += o.curvature_evaluations;
        self.guided_dead_ends += o.guided_dead_ends;
        self.guard_hits += o.guard_hits;
    }
}

/// A flat graph, stored under its canonical labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Found {
    pub form: CanonicalForm,
    pub vertices: usize,
    pub edges: usize,
    #[serde(skip)]
    pub graph: Graph,
}

impl Found {
    pub fn from_form(form: CanonicalForm) -> Result<Self, SearchError> {
        let graph = parse_graph6(form.as_str())?;
        Ok(Found { vertices: graph.order(), edges: graph.size(), graph, form })
    }
}

/// Outcome of one seeded case of the guided search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub case: usize,
    pub degrees: [usize; 4],
    pub completions: Vec<CanonicalForm>,
    pub dead_ends: u64,
    pub guard_hits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub constraints: SearchConstraints,
    pub found: Vec<Found>,
    pub counters: Counters,
    /// False when the run stopped early and left a checkpoint behind.
    pub complete: bool,
    pub elapsed_ms: u128,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<CaseOutcome>,
    pub notes: Vec<String>,
}

/// Why the degree cap is safe, and what the result does not cover.
pub fn standard_notes(c: &SearchConstraints) -> Vec<String> {
    vec![
        format!(
            "degree cap {}: every flat edge of girth-four graphs in scope, on a 4-cycle or not, has endpoint \
             degrees in {{2,3,4}}, so no vertex of degree 5 or more can occur",
            c.degree_cap
        ),
        format!("finite confirmation only: graphs with at most {} vertices were examined", c.max_vertices),
    ]
}

/// Sorts and deduplicates canonical forms into `Found` entries.
pub(crate) fn collect_found(forms: impl IntoIterator<Item = CanonicalForm>) -> Result<Vec<Found>, SearchError> {
    let set: BTreeMap<CanonicalForm, ()> = forms.into_iter().map(|f| (f, ())).collect();
    set.into_keys().map(Found::from_form).collect()
}

/// Independent re-check of a reported graph: girth four, vertex-disjoint
/// 4-cycles when required, every edge flat.
pub fn reverify(found: &Found, c: &SearchConstraints) -> Result<(), SearchError> {
    let g = &found.graph;
    if girth(g) != Some(4) {
        return Err(SearchError::Reverification(format!("{} does not have girth 4", found.form)));
    }
    if c.require_vertex_disjoint_4cycles && !four_cycles_vertex_disjoint(g) {
        return Err(SearchError::Reverification(format!("{} has overlapping 4-cycles", found.form)));
    }
    if g.max_degree() > c.degree_cap || !g.is_connected() {
        return Err(SearchError::Reverification(format!("{} violates the degree cap or connectivity", found.form)));
    }
    if !is_ricci_flat(g)?.is_ricci_flat {
        return Err(SearchError::Reverification(format!("{} is not Ricci-flat", found.form)));
    }
    Ok(())
}

/// Runs the search selected by `c.mode` on the current rayon pool.
pub fn enumerate_flat_graphs(c: &SearchConstraints) -> Result<SearchResult, SearchError> {
    match c.mode {
        Mode::Brute => brute::run(c, &brute::RunOptions::default()),
        Mode::Guided => guided::guided_search_with(c),
    }
}
