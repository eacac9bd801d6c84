mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use ricciflat::atlas;
use ricciflat::canon::canonical_form;
use ricciflat::cycles::{four_cycles, four_cycles_edge_disjoint, four_cycles_vertex_disjoint, girth};
use ricciflat::format::{parse_edgelist, parse_graph, parse_graph6, serialize_graph, to_dot, to_edgelist, to_graph6, GraphFormat, ParseError};
use ricciflat::Graph;

fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(p)).collect();
    Graph::new(n, edges).unwrap()
}

/// Shortest cycle through each edge: drop the edge and measure the detour.
fn naive_girth(g: &Graph) -> Option<usize> {
    g.edges()
        .iter()
        .filter_map(|&(u, v)| {
            let rest = Graph::new(g.order(), g.edges().iter().copied().filter(|&e| e != (u, v))).unwrap();
            rest.bfs(u, None)[v].map(|d| d + 1)
        })
        .min()
}

fn naive_four_cycles(g: &Graph) -> usize {
    let n = g.order();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in a + 1..n {
                for d in b + 1..n {
                    let distinct = b != c && c != d;
                    if distinct && g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(c, d) && g.has_edge(d, a) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn isomorphic(g: &Graph, h: &Graph, perms: &[Vec<usize>]) -> bool {
    g.order() == h.order() && g.size() == h.size() && perms.iter().any(|p| &g.permute(p) == h)
}

#[test]
fn girth_and_four_cycles_match_naive_counts() {
    let mut rng = common::rng(31);
    for _ in 0..300 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.7);
        let g = random_graph(&mut rng, n, p);
        assert_eq!(girth(&g), naive_girth(&g), "{g:?}");
        assert_eq!(four_cycles(&g).len(), naive_four_cycles(&g), "{g:?}");
    }
}

#[test]
fn canonical_form_decides_isomorphism() {
    let mut rng = common::rng(32);
    for n in 1..=7 {
        let perms = permutations(n);
        for _ in 0..40 {
            let g = random_graph(&mut rng, n, 0.4);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let same = g.permute(&perm);
            assert_eq!(canonical_form(&g).unwrap(), canonical_form(&same).unwrap());
            let other = random_graph(&mut rng, n, 0.4);
            assert_eq!(
                canonical_form(&g).unwrap() == canonical_form(&other).unwrap(),
                isomorphic(&g, &other, &perms),
                "{g:?} vs {other:?}"
            );
        }
    }
}

#[test]
fn canonical_form_separates_all_six_vertex_graphs() {
    // 156 isomorphism classes of graphs on six vertices.
    let mut forms = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << 15) {
        let edges: Vec<(usize, usize)> = (0..6)
            .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| e)
            .collect();
        forms.insert(canonical_form(&Graph::new(6, edges).unwrap()).unwrap());
    }
    assert_eq!(forms.len(), 156);
}

#[test]
fn atlas_cycle_structure() {
    assert_eq!(girth(&atlas::petersen()), Some(5));
    assert_eq!(girth(&atlas::dodecahedral()), Some(5));
    assert_eq!(girth(&atlas::r1()), Some(4));
    assert_eq!(four_cycles(&atlas::r1()).len(), 1);
    assert_eq!(four_cycles(&atlas::r2()).len(), 2);
    assert!(four_cycles_vertex_disjoint(&atlas::r2()));
    for k in 3..=8 {
        let g = atlas::diamond_necklace(k);
        assert!(four_cycles_edge_disjoint(&g));
        assert!(!four_cycles_vertex_disjoint(&g));
    }
}

#[test]
fn known_graph6_strings() {
    assert_eq!(to_graph6(&atlas::petersen()), "IheA@GUAo");
    assert_eq!(to_graph6(&atlas::complete(4)), "C~");
    assert_eq!(parse_graph6(">>graph6<<C~\n").unwrap(), atlas::complete(4));
}

#[test]
fn parse_errors_are_reported() {
    assert!(matches!(parse_edgelist(""), Err(ParseError::MalformedHeader(_))));
    assert!(matches!(parse_edgelist("3 1\n0 3\n"), Err(ParseError::VertexOutOfRange { line: 2, vertex: 3, n: 3 })));
    assert!(matches!(parse_edgelist("3 2\n0 1\n1 0\n"), Err(ParseError::DuplicateEdge { line: 3, .. })));
    assert!(matches!(parse_edgelist("3 1\n1 1\n"), Err(ParseError::SelfLoop { vertex: 1, .. })));
    assert!(matches!(parse_edgelist("3 2\n0 1\n"), Err(ParseError::EdgeCountMismatch { expected: 2, found: 1 })));
    assert!(matches!(parse_edgelist("3 1\n0 x\n"), Err(ParseError::MalformedEdge { line: 2, .. })));
    assert!(matches!(parse_graph6("C"), Err(ParseError::InvalidGraph6(_))));
    assert!(matches!(parse_graph(b"x", GraphFormat::Dot), Err(ParseError::ExportOnly)));
    assert!(matches!(parse_graph(&[0xff, 0xfe], GraphFormat::Edgelist), Err(ParseError::NotUtf8)));
}

#[test]
fn dot_lists_every_edge() {
    let g = atlas::r1();
    let dot = to_dot(&g);
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.matches(" -- ").count(), g.size());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn distances_form_a_metric(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = common::rng(seed);
        let g = common::random_triangle_free(&mut rng, n, 8);
        let d = g.distance_matrix();
        for u in 0..n {
            prop_assert_eq!(d[u][u], Some(0));
            for v in 0..n {
                prop_assert_eq!(d[u][v], d[v][u]);
                prop_assert_eq!(d[u][v] == Some(1), g.has_edge(u, v));
                for w in 0..n {
                    prop_assert!(d[u][w].unwrap() <= d[u][v].unwrap() + d[v][w].unwrap());
                }
            }
        }
    }

    #[test]
    fn formats_round_trip(seed in any::<u64>(), n in 0usize..=70, p in 0.0f64..0.5) {
        let mut rng = common::rng(seed);
        let g = random_graph(&mut rng, n, p);
        prop_assert_eq!(&parse_graph6(&to_graph6(&g)).unwrap(), &g);
        prop_assert_eq!(&parse_edgelist(&to_edgelist(&g)).unwrap(), &g);
        for f in [GraphFormat::Edgelist, GraphFormat::Graph6] {
            prop_assert_eq!(&parse_graph(&serialize_graph(&g, f), f).unwrap(), &g);
        }
    }

    #[test]
    fn capped_bfs_agrees_with_full_bfs(seed in any::<u64>(), n in 1usize..=12, cap in 0usize..4) {
        let mut rng = common::rng(seed);
        let g = common::random_triangle_free(&mut rng, n, 6);
        let full = g.bfs(0, None);
        let capped = g.bfs(0, Some(cap));
        for v in 0..n {
            prop_assert_eq!(capped[v], full[v].filter(|&d| d <= cap));
        }
    }
}
