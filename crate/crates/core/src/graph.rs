//! Immutable simple undirected graphs on the vertex set `0..n`.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("graph has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// A simple undirected graph with vertices `0..n`.
///
/// Adjacency lists are sorted and the edge list holds each edge once as
/// `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates and out-of-range endpoints.
    /// Edge orientation does not matter.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = (u.min(v), u.max(v));
            if adj[a].contains(&b) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
            list.push((a, b));
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        list.sort_unstable();
        Ok(Graph { adj, edges: list })
    }

    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    /// Builds a graph from bitmask rows (`rows[u]` has bit `v` set iff `uv` is an edge).
    pub fn from_masks(rows: &[u32]) -> Self {
        let n = rows.len();
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for (u, &row) in rows.iter().enumerate() {
            let mut m = row;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                if v < n {
                    adj[u].push(v);
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
        }
        Graph { adj, edges }
    }

    /// Bitmask rows; only valid for graphs with at most 32 vertices.
    pub fn to_masks(&self) -> Result<Vec<u32>, GraphError> {
        if self.order() > 32 {
            return Err(GraphError::TooLarge { n: self.order(), limit: 32 });
        }
        Ok(self
            .adj
            .iter()
            .map(|nb| nb.iter().fold(0u32, |m, &v| m | (1 << v)))
            .collect())
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Degrees in non-increasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.order() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.order() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.order() })
        }
    }

    pub fn check_edge(&self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if self.has_edge(u, v) {
            Ok(())
        } else {
            Err(GraphError::NotAnEdge(u, v))
        }
    }

    /// Hop distances from `src`; entries beyond `cap` hops (or unreachable) are `None`.
    pub fn bfs(&self, src: usize, cap: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.order()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if cap.is_some_and(|c| du >= c) {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path length between `u` and `v`, or `None` when no path of at
    /// most `cap` hops exists.
    pub fn distance(&self, u: usize, v: usize, cap: Option<usize>) -> Result<Option<usize>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs(u, cap)[v])
    }

    /// All-pairs hop distances (`None` for different components).
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.order()).map(|v| self.bfs(v, None)).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.order() == 0 || self.bfs(0, None).iter().all(Option::is_some)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.order(), "permutation length mismatch");
        Graph::new(self.order(), self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("a permutation of a simple graph is simple")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.order(), self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(Graph::new(3, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(
            Graph::new(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        );
    }

    #[test]
    fn cycle_distances() {
        let c6 = cycle(6);
        assert_eq!(c6.distance(0, 1, None).unwrap(), Some(1));
        assert_eq!(c6.distance(0, 3, None).unwrap(), Some(3));
        assert_eq!(c6.distance(2, 2, None).unwrap(), Some(0));
        assert_eq!(c6.distance(0, 3, Some(2)).unwrap(), None);
        assert!(c6.distance(0, 6, None).is_err());
    }

    #[test]
    fn unreachable_in_disconnected_graph() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.distance(0, 3, None).unwrap(), None);
        assert!(!g.is_connected());
    }

    #[test]
    fn masks_round_trip() {
        let g = cycle(5);
        assert_eq!(Graph::from_masks(&g.to_masks().unwrap()), g);
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = Graph::new(5, [(4, 0), (2, 0), (1, 3), (3, 4)]).unwrap();
        for u in 0..5 {
            assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
            for &v in g.neighbors(u) {
                assert!(g.neighbors(v).contains(&u));
            }
        }
        assert_eq!(g.edges(), &[(0, 2), (0, 4), (1, 3), (3, 4)]);
        assert_eq!(g.degree_sequence(), vec![2, 2, 2, 1, 1]);
    }
}
