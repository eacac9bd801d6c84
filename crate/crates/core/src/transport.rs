//! Exact transportation problems between finitely supported distributions.
//!
//! Masses are scaled to integers by their least common denominator and the
//! problem is solved as an integral min-cost flow by successive shortest
//! augmenting paths. The optimal plan comes back as exact rationals together
//! with a Lipschitz dual certificate whose objective equals the plan cost.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("masses sum to {0}, expected 1")]
    MassSum(String),
    #[error("negative mass {mass} at vertex {vertex}")]
    NegativeMass { vertex: usize, mass: String },
    #[error("vertex {0} appears twice in a support")]
    DuplicateSupport(usize),
    #[error("negative cost {cost} at ({row}, {col})")]
    NegativeCost { row: usize, col: usize, cost: i64 },
    #[error("cost matrix is {rows}x{cols}, supports are {supply}x{demand}")]
    DimensionMismatch { rows: usize, cols: usize, supply: usize, demand: usize },
    #[error("scaled masses do not fit in 64-bit integers")]
    Overflow,
    #[error("dual objective {dual} differs from plan cost {primal}; the cost is not a metric")]
    DualityGap { primal: String, dual: String },
}

/// A probability distribution with finite support and exact masses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassVector {
    support: Vec<usize>,
    #[serde(serialize_with = "serialize_rationals")]
    masses: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

impl MassVector {
    /// Validates distinct support, nonnegative masses and total mass one.
    pub fn new(entries: Vec<(usize, Rational)>) -> Result<Self, TransportError> {
        let mut support = Vec::with_capacity(entries.len());
        let mut masses = Vec::with_capacity(entries.len());
        let mut total = Rational::zero();
        for (v, m) in entries {
            if m.is_negative() {
                return Err(TransportError::NegativeMass { vertex: v, mass: rational::format(&m) });
            }
            if support.contains(&v) {
                return Err(TransportError::DuplicateSupport(v));
            }
            total += &m;
            support.push(v);
            masses.push(m);
        }
        if !total.is_one() {
            return Err(TransportError::MassSum(rational::format(&total)));
        }
        Ok(MassVector { support, masses })
    }

    /// Unit mass at `v`.
    pub fn point(v: usize) -> Self {
        MassVector { support: vec![v], masses: vec![Rational::one()] }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.support.iter().copied().zip(self.masses.iter())
    }

    /// Mass at `v` (zero off the support).
    pub fn mass(&self, v: usize) -> Rational {
        self.position(v).map_or_else(Rational::zero, |i| self.masses[i].clone())
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.support.iter().position(|&w| w == v)
    }

    /// Vertices carrying positive mass.
    pub fn positive_support(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter().filter(|(_, m)| m.is_positive()).map(|(v, _)| v)
    }
}

/// Nonnegative integer costs indexed by supply position × demand position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost data length must be rows * cols");
        CostMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        CostMatrix { rows, cols, data }
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.cols + col]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Swaps the roles of supply and demand.
    pub fn transpose(&self) -> Self {
        CostMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub source: usize,
    pub target: usize,
    #[serde(with = "rational::as_string")]
    pub amount: Rational,
}

/// Primal solution: positive moves sorted by `(source, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportPlan {
    pub moves: Vec<Move>,
    #[serde(with = "rational::as_string")]
    pub cost: Rational,
}

/// Dual solution: a potential on the union of the positive supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualCertificate {
    #[serde(serialize_with = "serialize_potential")]
    pub potential: BTreeMap<usize, Rational>,
    #[serde(with = "rational::as_string")]
    pub objective: Rational,
}

fn serialize_potential<S: serde::Serializer>(p: &BTreeMap<usize, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(p.iter().map(|(v, f)| (v.to_string(), rational::format(f))))
}

impl DualCertificate {
    /// `Σ f(u) (supply(u) − demand(u))` over the certificate's vertices.
    pub fn evaluate(potential: &BTreeMap<usize, Rational>, supply: &MassVector, demand: &MassVector) -> Rational {
        potential
            .iter()
            .map(|(&v, f)| f * (supply.mass(v) - demand.mass(v)))
            .fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Solves `min Σ cost(i, j) X_ij` subject to row sums `supply`, column sums
/// `demand`, `X >= 0`.
///
/// The certificate is built by c-transforming the flow potentials. It is
/// 1-Lipschitz for the underlying distance whenever the cost matrix is the
/// restriction of a metric; otherwise the solver reports a duality gap.
pub fn solve_transport(
    supply: &MassVector,
    demand: &MassVector,
    cost: &CostMatrix,
) -> Result<(TransportPlan, DualCertificate), TransportError> {
    if cost.rows != supply.len() || cost.cols != demand.len() {
        return Err(TransportError::DimensionMismatch {
            rows: cost.rows,
            cols: cost.cols,
            supply: supply.len(),
            demand: demand.len(),
        });
    }
    if let Some(k) = cost.data.iter().position(|&c| c < 0) {
        return Err(TransportError::NegativeCost { row: k / cost.cols, col: k % cost.cols, cost: cost.data[k] });
    }
    // Zero-mass entries are dropped; the masses were validated on construction.
    let rows: Vec<usize> = (0..supply.len()).filter(|&i| supply.masses[i].is_positive()).collect();
    let cols: Vec<usize> = (0..demand.len()).filter(|&j| demand.masses[j].is_positive()).collect();

    let scale = rows
        .iter()
        .map(|&i| supply.masses[i].denom())
        .chain(cols.iter().map(|&j| demand.masses[j].denom()))
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let scaled = |m: &Rational| -> Result<i64, TransportError> {
        (m * Rational::from_integer(scale.clone())).to_integer().to_i64().ok_or(TransportError::Overflow)
    };
    let a: Vec<i64> = rows.iter().map(|&i| scaled(&supply.masses[i])).collect::<Result<_, _>>()?;
    let b: Vec<i64> = cols.iter().map(|&j| scaled(&demand.masses[j])).collect::<Result<_, _>>()?;
    let c: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| cost.get(i, j)).collect()).collect();

    let mut flow = MinCostFlow::new(a, b, c);
    flow.run();
    let (p, q) = flow.duals();

    let scale = Rational::from_integer(scale);
    let mut moves = Vec::new();
    let mut total = Rational::zero();
    for (ri, &i) in rows.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            let x = flow.flow[ri][cj];
            if x > 0 {
                let amount = Rational::from_integer(BigInt::from(x)) / &scale;
                total += &amount * Rational::from_integer(BigInt::from(cost.get(i, j)));
                moves.push(Move { source: supply.support[i], target: demand.support[j], amount });
            }
        }
    }
    moves.sort_by_key(|m| (m.source, m.target));
    let plan = TransportPlan { moves, cost: total };

    // c-transform: p'(i) = min_j c(i,j) - q(j) on supply vertices, then the
    // McShane-type extension max_i p'(i) - c(i,j) on demand-only vertices.
    let p_best: Vec<i64> = (0..rows.len())
        .map(|ri| (0..cols.len()).map(|cj| flow.cost[ri][cj] - q[cj]).min().unwrap_or(p[ri]))
        .collect();
    let mut raw: BTreeMap<usize, i64> = BTreeMap::new();
    for (ri, &i) in rows.iter().enumerate() {
        raw.insert(supply.support[i], p_best[ri]);
    }
    for (cj, &j) in cols.iter().enumerate() {
        let v = demand.support[j];
        raw.entry(v)
            .or_insert_with(|| (0..rows.len()).map(|ri| p_best[ri] - flow.cost[ri][cj]).max().unwrap_or(0));
    }
    let floor = raw.values().copied().min().unwrap_or(0);
    let potential: BTreeMap<usize, Rational> = raw
        .into_iter()
        .map(|(v, f)| (v, Rational::from_integer(BigInt::from(f - floor))))
        .collect();
    let objective = DualCertificate::evaluate(&potential, supply, demand);
    if objective != plan.cost {
        return Err(TransportError::DualityGap {
            primal: rational::format(&plan.cost),
            dual: rational::format(&objective),
        });
    }
    Ok((plan, DualCertificate { potential, objective }))
}

/// Dense bipartite min-cost flow on integer supplies and demands.
struct MinCostFlow {
    supply: Vec<i64>,
    demand: Vec<i64>,
    cost: Vec<Vec<i64>>,
    flow: Vec<Vec<i64>>,
}

const INF: i64 = i64::MAX / 4;

impl MinCostFlow {
    fn new(supply: Vec<i64>, demand: Vec<i64>, cost: Vec<Vec<i64>>) -> Self {
        let flow = vec![vec![0; demand.len()]; supply.len()];
        MinCostFlow { supply, demand, cost, flow }
    }

    fn m(&self) -> usize {
        self.supply.len()
    }

    fn k(&self) -> usize {
        self.demand.len()
    }

    /// Bellman-Ford over the residual network. Nodes `0..m` are supply
    /// positions, `m..m+k` demand positions. Forward arcs are uncapacitated;
    /// a backward arc exists wherever flow is positive.
    fn shortest_paths(&self, sources: &[usize]) -> (Vec<i64>, Vec<usize>) {
        let (m, k) = (self.m(), self.k());
        let mut dist = vec![INF; m + k];
        let mut pred = vec![usize::MAX; m + k];
        for &s in sources {
            dist[s] = 0;
        }
        for _ in 0..(m + k) {
            let mut changed = false;
            for i in 0..m {
                if dist[i] == INF {
                    continue;
                }
                for j in 0..k {
                    let nd = dist[i] + self.cost[i][j];
                    if nd < dist[m + j] {
                        dist[m + j] = nd;
                        pred[m + j] = i;
                        changed = true;
                    }
                }
            }
            for j in 0..k {
                if dist[m + j] == INF {
                    continue;
                }
                for i in 0..m {
                    if self.flow[i][j] > 0 {
                        let nd = dist[m + j] - self.cost[i][j];
                        if nd < dist[i] {
                            dist[i] = nd;
                            pred[i] = m + j;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (dist, pred)
    }

    /// Successive shortest paths. Among equally short augmenting paths the
    /// lexicographically least `(source, target)` pair is used.
    fn run(&mut self) {
        let (m, k) = (self.m(), self.k());
        let mut rem_s = self.supply.clone();
        let mut rem_d = self.demand.clone();
        while rem_s.iter().any(|&s| s > 0) {
            let mut best: Option<(i64, usize, usize, Vec<usize>)> = None;
            for i in (0..m).filter(|&i| rem_s[i] > 0) {
                let (dist, pred) = self.shortest_paths(&[i]);
                for j in (0..k).filter(|&j| rem_d[j] > 0) {
                    if best.as_ref().is_none_or(|b| dist[m + j] < b.0) {
                        best = Some((dist[m + j], i, j, pred.clone()));
                    }
                }
            }
            let (_, i, j, pred) = best.expect("balanced supply and demand");
            // Walk back from demand j to supply i.
            let mut path = Vec::new();
            let mut node = m + j;
            while node != i {
                let prev = pred[node];
                path.push((prev, node));
                node = prev;
            }
            let mut delta = rem_s[i].min(rem_d[j]);
            for &(from, to) in &path {
                if from >= m {
                    delta = delta.min(self.flow[to][from - m]);
                }
            }
            for &(from, to) in &path {
                if from < m {
                    self.flow[from][to - m] += delta;
                } else {
                    self.flow[to][from - m] -= delta;
                }
            }
            rem_s[i] -= delta;
            rem_d[j] -= delta;
        }
    }

    /// Dual prices `(p, q)` with `p_i + q_j <= c_ij`, tight on positive flow.
    fn duals(&self) -> (Vec<i64>, Vec<i64>) {
        let (m, k) = (self.m(), self.k());
        let all: Vec<usize> = (0..m + k).collect();
        let (pi, _) = self.shortest_paths(&all);
        let p = (0..m).map(|i| -pi[i]).collect();
        let q = (0..k).map(|j| pi[m + j]).collect();
        (p, q)
    }
}

/// Why a plan or certificate failed an independent re-check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("negative amount on move {from}->{to}")]
    NegativeAmount { from: usize, to: usize },
    #[error("move {from}->{to} leaves the supports")]
    OffSupport { from: usize, to: usize },
    #[error("outflow of {vertex} is {found}, expected {expected}")]
    Marginal { vertex: usize, found: String, expected: String },
    #[error("inflow of {vertex} is {found}, expected {expected}")]
    DemandMarginal { vertex: usize, found: String, expected: String },
    #[error("stated cost {stated} differs from recomputed {recomputed}")]
    Cost { stated: String, recomputed: String },
    #[error("no potential for vertex {0}")]
    MissingPotential(usize),
    #[error("|f({u}) - f({v})| exceeds d({u},{v}) = {distance}")]
    Lipschitz { u: usize, v: usize, distance: String },
    #[error("vertices {0} and {1} are not connected")]
    Unreachable(usize, usize),
    #[error("stated objective {stated} differs from recomputed {recomputed}")]
    Objective { stated: String, recomputed: String },
}

/// Re-checks feasibility and cost of `plan` without trusting the solver.
pub fn verify_plan(
    plan: &TransportPlan,
    supply: &MassVector,
    demand: &MassVector,
    cost: &CostMatrix,
) -> Result<(), Violation> {
    let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut inc: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut total = Rational::zero();
    for mv in &plan.moves {
        if mv.amount.is_negative() {
            return Err(Violation::NegativeAmount { from: mv.source, to: mv.target });
        }
        let (Some(i), Some(j)) = (supply.position(mv.source), demand.position(mv.target)) else {
            return Err(Violation::OffSupport { from: mv.source, to: mv.target });
        };
        *out.entry(mv.source).or_insert_with(Rational::zero) += &mv.amount;
        *inc.entry(mv.target).or_insert_with(Rational::zero) += &mv.amount;
        total += &mv.amount * Rational::from_integer(BigInt::from(cost.get(i, j)));
    }
    for (v, m) in supply.iter() {
        let found = out.get(&v).cloned().unwrap_or_else(Rational::zero);
        if &found != m {
            return Err(Violation::Marginal { vertex: v, found: rational::format(&found), expected: rational::format(m) });
        }
    }
    for (v, m) in demand.iter() {
        let found = inc.get(&v).cloned().unwrap_or_else(Rational::zero);
        if &found != m {
            return Err(Violation::DemandMarginal {
                vertex: v,
                found: rational::format(&found),
                expected: rational::format(m),
            });
        }
    }
    if total != plan.cost {
        return Err(Violation::Cost { stated: rational::format(&plan.cost), recomputed: rational::format(&total) });
    }
    Ok(())
}

/// Re-checks that the certificate's potential is 1-Lipschitz for `distance`
/// on the union of the positive supports and that its stated objective is
/// `Σ f(u)(supply(u) − demand(u))`.
pub fn verify_certificate(
    cert: &DualCertificate,
    supply: &MassVector,
    demand: &MassVector,
    distance: impl Fn(usize, usize) -> Option<u64>,
) -> Result<(), Violation> {
    let mut union: Vec<usize> = supply.positive_support().chain(demand.positive_support()).collect();
    union.sort_unstable();
    union.dedup();
    for &v in &union {
        if !cert.potential.contains_key(&v) {
            return Err(Violation::MissingPotential(v));
        }
    }
    for (a, &u) in union.iter().enumerate() {
        for &v in &union[a + 1..] {
            let d = distance(u, v).ok_or(Violation::Unreachable(u, v))?;
            let gap = (&cert.potential[&u] - &cert.potential[&v]).abs();
            if gap > Rational::from_integer(BigInt::from(d)) {
                return Err(Violation::Lipschitz { u, v, distance: d.to_string() });
            }
        }
    }
    let recomputed = union
        .iter()
        .map(|&v| &cert.potential[&v] * (supply.mass(v) - demand.mass(v)))
        .fold(Rational::zero(), |acc, x| acc + x);
    if recomputed != cert.objective {
        return Err(Violation::Objective {
            stated: rational::format(&cert.objective),
            recomputed: rational::format(&recomputed),
        });
    }
    Ok(())
}

impl fmt::Display for TransportPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for mv in &self.moves {
            writeln!(f, "{} -> {}: {}", mv.source, mv.target, mv.amount)?;
        }
        write!(f, "cost {}", self.cost)
    }
}
