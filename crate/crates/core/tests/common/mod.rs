#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use ricciflat::canon::canonical_form;
use ricciflat::rational::{int, rat};
use ricciflat::{Graph, Rational};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random connected triangle-free graph: a random tree plus up to `extra`
/// random chords that close no triangle.
pub fn random_triangle_free(rng: &mut StdRng, n: usize, extra: usize) -> Graph {
    let mut adj = vec![vec![false; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let a = order[i];
        let b = order[rng.gen_range(0..i)];
        adj[a][b] = true;
        adj[b][a] = true;
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || adj[a][b] || (0..n).any(|c| adj[a][c] && adj[b][c]) {
            continue;
        }
        adj[a][b] = true;
        adj[b][a] = true;
    }
    from_matrix(&adj)
}

pub fn from_matrix(adj: &[Vec<bool>]) -> Graph {
    let n = adj.len();
    let edges = (0..n).flat_map(|a| (a + 1..n).filter(move |&b| adj[a][b]).map(move |b| (a, b)));
    Graph::new(n, edges).unwrap()
}

/// Connected graphs on `1..=max_n` vertices, one per isomorphism class,
/// grown by attaching a vertex to every nonempty subset.
pub fn connected_graphs(max_n: usize) -> Vec<Vec<Graph>> {
    let mut levels = vec![vec![Graph::empty(1)]];
    for n in 2..=max_n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &levels[n - 2] {
            for s in 1u32..(1 << (n - 1)) {
                let mut edges = g.edges().to_vec();
                edges.extend((0..n - 1).filter(|&v| s & (1 << v) != 0).map(|v| (v, n - 1)));
                let h = Graph::new(n, edges).unwrap();
                if seen.insert(canonical_form(&h).unwrap()) {
                    next.push(h);
                }
            }
        }
        levels.push(next);
    }
    levels
}

/// `W(m_x^α, m_y^α)` as the maximum of `Σ f (m_x − m_y)` over integer
/// 1-Lipschitz `f` on `N[x] ∪ N[y]` with `f(x) = 0`. Integer potentials
/// suffice because the Lipschitz constraints form a network matrix.
pub fn dual_oracle_w(g: &Graph, x: usize, y: usize, alpha: &Rational) -> Rational {
    let mut support: Vec<usize> = vec![x];
    for v in g.neighbors(x).iter().chain([y].iter()).chain(g.neighbors(y)) {
        if !support.contains(v) {
            support.push(*v);
        }
    }
    let dist: Vec<Vec<i64>> = support
        .iter()
        .map(|&u| {
            let d = g.bfs(u, None);
            support.iter().map(|&v| d[v].unwrap() as i64).collect()
        })
        .collect();
    let (dx, dy) = (g.degree(x) as i64, g.degree(y) as i64);
    let (p, q) = (alpha.numer().clone(), alpha.denom().clone());
    // Masses scaled by q·dx·dy.
    let scale = &q * BigInt::from(dx * dy);
    let weight: Vec<BigInt> = support
        .iter()
        .map(|&v| {
            let m = |c: usize, other: i64| -> BigInt {
                if v == c {
                    &p * BigInt::from(dx * dy)
                } else if g.has_edge(c, v) {
                    (&q - &p) * BigInt::from(other)
                } else {
                    BigInt::from(0)
                }
            };
            m(x, dy) - m(y, dx)
        })
        .collect();
    let mut f = vec![0i64; support.len()];
    let mut best: Option<BigInt> = None;
    search(1, &mut f, &dist, &weight, &mut best);
    Rational::new(best.unwrap(), scale)
}

fn search(i: usize, f: &mut Vec<i64>, dist: &[Vec<i64>], weight: &[BigInt], best: &mut Option<BigInt>) {
    if i == f.len() {
        let v: BigInt = f.iter().zip(weight).map(|(a, w)| BigInt::from(*a) * w).sum();
        if best.as_ref().is_none_or(|b| &v > b) {
            *best = Some(v);
        }
        return;
    }
    let d0 = dist[0][i];
    for val in -d0..=d0 {
        if (1..i).all(|j| (val - f[j]).abs() <= dist[i][j]) {
            f[i] = val;
            search(i + 1, f, dist, weight, best);
        }
    }
}

/// `(1 − W)/(1 − α)` from the dual oracle.
pub fn oracle_quotient(g: &Graph, x: usize, y: usize, alpha: &Rational) -> Rational {
    (int(1) - dual_oracle_w(g, x, y, alpha)) / (int(1) - alpha)
}

/// Sample points inside the linear region `[1/(D+1), 1)`.
pub fn dense_alphas(d: i64) -> Vec<Rational> {
    let mut v: Vec<Rational> = (1..=6).map(|j| int(1) - rat(j, 6 * (d + 1))).collect();
    v.push(rat(1, 2).max(rat(1, d + 1)));
    v
}

/// Random 1-Lipschitz function on all vertices: a scaled minimum of shifted
/// distance functions.
pub fn random_lipschitz(rng: &mut StdRng, g: &Graph) -> Vec<Rational> {
    let n = g.order();
    let anchors: Vec<(usize, Rational)> =
        (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(0..n), rat(rng.gen_range(-6..=6), rng.gen_range(1..=4)))).collect();
    let t = rat(rng.gen_range(0..=8), 8);
    let dists: Vec<Vec<Option<usize>>> = anchors.iter().map(|(a, _)| g.bfs(*a, None)).collect();
    (0..n)
        .map(|v| {
            let m = anchors
                .iter()
                .zip(&dists)
                .map(|((_, c), d)| c + int(d[v].unwrap() as i64))
                .min()
                .unwrap();
            &t * m
        })
        .collect()
}
