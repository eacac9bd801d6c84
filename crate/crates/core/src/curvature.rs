//! Lazy random-walk distributions and exact Lin-Lu-Yau curvature.
//!
//! For an edge `xy` with `D = max(d_x, d_y)` the quotient
//! `(1 − W(m_x^α, m_y^α)) / (1 − α)` is constant for `α` close to one.
//! [`ricci_curvature`] evaluates it at `α₁ = D/(D+1)` and
//! `α₂ = (2D+1)/(2D+2)` and accepts the value only if the two agree. On a
//! disagreement it keeps halving the distance to one, up to ten more probes.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::rational::{self, int, rat, Rational};
use crate::transport::{
    solve_transport, verify_certificate, verify_plan, CostMatrix, DualCertificate, MassVector, TransportError,
    TransportPlan, Violation,
};

/// Probes tried after the two standard ones before giving up.
pub const EXTRA_PROBES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is isolated")]
    Isolated(usize),
    #[error("alpha {0} is outside [0, 1]")]
    AlphaOutOfRange(String),
    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("solver output failed verification: {0}")]
    Verification(#[from] Violation),
    #[error("curvature quotient of {x}-{y} did not stabilize; last quotients {last:?}")]
    ProbeDisagreement { x: usize, y: usize, last: Vec<String> },
}

/// The lazy distribution `m_x^α`: mass `α` at `x` and `(1 − α)/d_x` on each
/// neighbor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaDistribution {
    pub center: usize,
    #[serde(with = "rational::as_string")]
    pub alpha: Rational,
    pub masses: MassVector,
}

pub fn mass_distribution(g: &Graph, x: usize, alpha: &Rational) -> Result<AlphaDistribution, CurvatureError> {
    g.check_vertex(x)?;
    if alpha < &Rational::zero() || alpha > &Rational::one() {
        return Err(CurvatureError::AlphaOutOfRange(rational::format(alpha)));
    }
    let d = g.degree(x);
    if d == 0 {
        return Err(CurvatureError::Isolated(x));
    }
    let share = (Rational::one() - alpha) / int(d as i64);
    let mut entries = vec![(x, alpha.clone())];
    entries.extend(g.neighbors(x).iter().map(|&v| (v, share.clone())));
    let masses = MassVector::new(entries)?;
    Ok(AlphaDistribution { center: x, alpha: alpha.clone(), masses })
}

/// Exact `W(m_x^α, m_y^α)` for an edge, with a re-verified plan and
/// certificate.
pub fn wasserstein_edge(
    g: &Graph,
    x: usize,
    y: usize,
    alpha: &Rational,
) -> Result<(Rational, TransportPlan, DualCertificate), CurvatureError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if !g.has_edge(x, y) {
        return Err(CurvatureError::NotAdjacent(x, y));
    }
    let mx = mass_distribution(g, x, alpha)?.masses;
    let my = mass_distribution(g, y, alpha)?.masses;
    // Every vertex of N[x] is within three hops of every vertex of N[y].
    let dist: Vec<Vec<Option<usize>>> = mx.support().iter().map(|&u| g.bfs(u, Some(3))).collect();
    let cost = CostMatrix::from_fn(mx.len(), my.len(), |i, j| {
        dist[i][my.support()[j]].expect("supports of adjacent vertices are within distance 3") as i64
    });
    let (plan, cert) = solve_transport(&mx, &my, &cost)?;
    verify_plan(&plan, &mx, &my, &cost)?;
    let oracle = |u: usize, v: usize| -> Option<u64> {
        match mx.position(u) {
            Some(i) => dist[i][v].map(|d| d as u64),
            None => match mx.position(v) {
                Some(i) => dist[i][u].map(|d| d as u64),
                None => g.bfs(u, None)[v].map(|d| d as u64),
            },
        }
    };
    verify_certificate(&cert, &mx, &my, oracle)?;
    Ok((plan.cost.clone(), plan, cert))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Probe {
    #[serde(with = "rational::as_string")]
    pub alpha: Rational,
    #[serde(rename = "w", with = "rational::as_string")]
    pub wasserstein: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCurvatureReport {
    pub edge: (usize, usize),
    #[serde(with = "rational::as_string")]
    pub kappa: Rational,
    /// The two agreeing probes the value was read from.
    pub probes: Vec<Probe>,
    pub plan: TransportPlan,
    pub certificate: DualCertificate,
    pub flat: bool,
}

fn quotient(alpha: &Rational, w: &Rational) -> Rational {
    (Rational::one() - w) / (Rational::one() - alpha)
}

/// Exact curvature `κ(x, y)` by the probe method.
pub fn ricci_curvature(g: &Graph, x: usize, y: usize) -> Result<EdgeCurvatureReport, CurvatureError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if !g.has_edge(x, y) {
        return Err(CurvatureError::NotAdjacent(x, y));
    }
    let d = g.degree(x).max(g.degree(y)) as i64;
    let mut alpha = rat(d, d + 1);
    let (w, plan, cert) = wasserstein_edge(g, x, y, &alpha)?;
    let mut prev = (alpha.clone(), w, plan, cert);
    alpha = rat(2 * d + 1, 2 * d + 2);
    for _ in 0..=EXTRA_PROBES {
        let (w, plan, cert) = wasserstein_edge(g, x, y, &alpha)?;
        let q_prev = quotient(&prev.0, &prev.1);
        let q = quotient(&alpha, &w);
        if q == q_prev {
            let (a0, w0, plan0, cert0) = prev;
            return Ok(EdgeCurvatureReport {
                edge: (x, y),
                flat: q.is_zero(),
                kappa: q,
                probes: vec![Probe { alpha: a0, wasserstein: w0 }, Probe { alpha: alpha.clone(), wasserstein: w }],
                plan: plan0,
                certificate: cert0,
            });
        }
        let next = (&alpha + Rational::one()) / int(2);
        prev = (alpha, w, plan, cert);
        alpha = next;
    }
    let last = quotient(&prev.0, &prev.1);
    Err(CurvatureError::ProbeDisagreement { x, y, last: vec![rational::format(&last)] })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphCurvatureReport {
    pub edges: Vec<EdgeCurvatureReport>,
    pub is_ricci_flat: bool,
    #[serde(with = "rational::as_opt_string")]
    pub min_kappa: Option<Rational>,
    #[serde(with = "rational::as_opt_string")]
    pub max_kappa: Option<Rational>,
    pub flat_edges: usize,
}

impl GraphCurvatureReport {
    /// Edges whose curvature is not zero.
    pub fn non_flat(&self) -> impl Iterator<Item = &EdgeCurvatureReport> {
        self.edges.iter().filter(|e| !e.flat)
    }
}

/// Curvature of every edge, in sorted edge order.
///
/// Edges are evaluated on the current rayon pool; the result does not depend
/// on the number of workers.
pub fn is_ricci_flat(g: &Graph) -> Result<GraphCurvatureReport, CurvatureError> {
    if let Some(v) = (0..g.order()).find(|&v| g.degree(v) == 0) {
        return Err(CurvatureError::Isolated(v));
    }
    let edges: Vec<EdgeCurvatureReport> =
        g.edges().par_iter().map(|&(x, y)| ricci_curvature(g, x, y)).collect::<Result<_, _>>()?;
    let flat_edges = edges.iter().filter(|e| e.flat).count();
    Ok(GraphCurvatureReport {
        is_ricci_flat: flat_edges == edges.len(),
        min_kappa: edges.iter().map(|e| &e.kappa).min().cloned(),
        max_kappa: edges.iter().map(|e| &e.kappa).max().cloned(),
        flat_edges,
        edges,
    })
}

/// Sequential flatness test that stops at the first edge with `κ ≠ 0`.
pub fn all_edges_flat(g: &Graph) -> Result<bool, CurvatureError> {
    for &(x, y) in g.edges() {
        if !ricci_curvature(g, x, y)?.flat {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    #[serde(with = "rational::as_string")]
    pub alpha: Rational,
    #[serde(rename = "w", with = "rational::as_string")]
    pub wasserstein: Rational,
    /// `(1 − W)/(1 − α)`; undefined at `α = 1`.
    #[serde(with = "rational::as_opt_string")]
    pub quotient: Option<Rational>,
}

/// Samples `W` and the curvature quotient at each requested `α`.
pub fn curvature_profile(
    g: &Graph,
    x: usize,
    y: usize,
    alphas: &[Rational],
) -> Result<Vec<ProfileRow>, CurvatureError> {
    alphas
        .iter()
        .map(|a| {
            let (w, _, _) = wasserstein_edge(g, x, y, a)?;
            let quotient = (!a.is_one()).then(|| quotient(a, &w));
            Ok(ProfileRow { alpha: a.clone(), wasserstein: w, quotient })
        })
        .collect()
}
