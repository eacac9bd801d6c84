mod common;

use num_traits::Zero;
use rand::Rng;
use ricciflat::atlas;
use ricciflat::curvature::ricci_curvature;
use ricciflat::cycles::{four_cycles, four_cycles_vertex_disjoint, girth};
use ricciflat::local::{
    check_lemma2, classify_four_cycle_edge, curvature_upper_bound, edge_cycle_profile, gadget_for_row,
    neighbor_distances, table_rows, verify_tables, FourCycleClass, LocalError, NoFourCycleCase,
};
use ricciflat::rational::{int, rat};
use ricciflat::Graph;

/// Simple x–y paths of length `len` avoiding the edge xy itself.
fn paths(g: &Graph, x: usize, y: usize, len: usize) -> usize {
    fn walk(g: &Graph, at: usize, y: usize, left: usize, seen: &mut Vec<usize>) -> usize {
        if left == 0 {
            return usize::from(at == y);
        }
        let mut total = 0;
        for &v in g.neighbors(at) {
            if seen.contains(&v) || (v == y && left != 1) {
                continue;
            }
            seen.push(v);
            total += walk(g, v, y, left - 1, seen);
            seen.pop();
        }
        total
    }
    let mut seen = vec![x];
    walk(g, x, y, len, &mut seen)
}

#[test]
fn tables_reproduce_exactly() {
    let report = verify_tables();
    assert_eq!((report.passed, report.total), (16, 16));
    let expected: Vec<_> = [
        int(1), rat(1, 2), rat(1, 3), rat(1, 4), int(0),
        rat(-1, 3), rat(-1, 12), int(0), rat(-1, 4), int(0), rat(-1, 12), int(0), rat(1, 12),
        rat(-1, 2), rat(-1, 4), int(0),
    ]
    .into_iter()
    .map(Some)
    .collect();
    let computed: Vec<_> = report.rows.iter().map(|r| r.computed.clone()).collect();
    assert_eq!(computed, expected);
}

#[test]
fn gadgets_realize_their_rows() {
    for spec in table_rows() {
        let gd = gadget_for_row(&spec).unwrap();
        let g = &gd.graph;
        assert_eq!(girth(g), Some(4));
        assert_eq!((g.degree(gd.x), g.degree(gd.y)), spec.degrees);
        assert_eq!(paths(g, gd.x, gd.y, 3), 1);
        for (i, &a) in gd.x_side.iter().enumerate() {
            for (j, &b) in gd.y_side.iter().enumerate() {
                let d = g.bfs(a, None)[b].unwrap();
                assert_eq!(d, spec.pattern[i][j] as usize, "table {} row {}", spec.table, spec.row);
            }
        }
        let kappa = ricci_curvature(g, gd.x, gd.y).unwrap().kappa;
        if kappa.is_zero() {
            assert!(classify_four_cycle_edge(g, gd.x, gd.y).unwrap().is_flat_compatible());
        }
    }
}

#[test]
fn cycle_profiles_match_path_counts() {
    let mut rng = common::rng(41);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let g = common::random_triangle_free(&mut rng, n, 10);
        for &(x, y) in g.edges() {
            let p = edge_cycle_profile(&g, x, y).unwrap();
            assert_eq!(p.triangle_count, paths(&g, x, y, 2));
            assert_eq!(p.four_cycle_count, paths(&g, x, y, 3));
            assert_eq!(p.five_cycle_count, paths(&g, x, y, 4));
        }
    }
}

#[test]
fn cycle_profile_examples() {
    let p = edge_cycle_profile(&atlas::cycle(4), 0, 1).unwrap();
    assert_eq!((p.triangle_count, p.four_cycle_count, p.five_cycle_count), (0, 1, 0));
    let g = atlas::petersen();
    for &(x, y) in g.edges() {
        let p = edge_cycle_profile(&g, x, y).unwrap();
        assert_eq!((p.triangle_count, p.four_cycle_count, p.five_cycle_count), (0, 0, 4));
    }
}

#[test]
fn classifier_examples() {
    assert_eq!(classify_four_cycle_edge(&atlas::r2(), 0, 1).unwrap(), FourCycleClass::Deg34B);
    assert_eq!(classify_four_cycle_edge(&atlas::r1(), 0, 1).unwrap(), FourCycleClass::Deg44);
    let p = atlas::petersen();
    for &(x, y) in p.edges() {
        assert_eq!(check_lemma2(&p, x, y).unwrap(), NoFourCycleCase::Case2);
    }
    assert!(matches!(check_lemma2(&atlas::r1(), 0, 1), Err(LocalError::Hypothesis(_))));
    let d = neighbor_distances(&atlas::r1(), 0, 1).unwrap();
    assert!(d.iter().all(|w| w.distance.is_some_and(|d| (2..=3).contains(&d))));
}

#[test]
fn flat_edges_pass_their_classifier() {
    for g in [atlas::r1(), atlas::r2(), atlas::petersen(), atlas::dodecahedral(), atlas::half_dodecahedral(), atlas::cycle(8)] {
        for &(x, y) in g.edges() {
            if edge_cycle_profile(&g, x, y).unwrap().four_cycle_count == 0 {
                assert!(!check_lemma2(&g, x, y).unwrap().is_violation());
            } else {
                assert!(classify_four_cycle_edge(&g, x, y).unwrap().is_flat_compatible());
            }
        }
    }
}

#[test]
fn classifiers_never_reject_a_flat_edge() {
    let mut rng = common::rng(42);
    let (mut flat_off, mut flat_on) = (0, 0);
    for _ in 0..600 {
        let n = rng.gen_range(5..=12);
        let extra = rng.gen_range(0..8);
        let g = common::random_triangle_free(&mut rng, n, extra);
        if g.max_degree() > 4 {
            continue;
        }
        let disjoint = four_cycles_vertex_disjoint(&g);
        for &(x, y) in g.edges() {
            let kappa = ricci_curvature(&g, x, y).unwrap().kappa;
            let fours = edge_cycle_profile(&g, x, y).unwrap().four_cycle_count;
            if fours == 0 {
                let case = check_lemma2(&g, x, y).unwrap();
                if kappa.is_zero() {
                    flat_off += 1;
                    assert!(!case.is_violation(), "{g:?} {x}-{y}");
                }
            } else if disjoint && fours == 1 && kappa.is_zero() {
                flat_on += 1;
                assert!(classify_four_cycle_edge(&g, x, y).unwrap().is_flat_compatible(), "{g:?} {x}-{y}");
            }
        }
    }
    assert!(flat_off > 100, "only {flat_off} flat edges off 4-cycles sampled");
    assert!(flat_on > 0, "no flat 4-cycle edges sampled");
}

/// Edge `01` with `dx`, `dy`, optionally on the 4-cycle `0-1-2-3`, and one
/// private bridge for every listed neighbor pair at distance 2.
fn local_gadget(dx: usize, dy: usize, on_cycle: bool, mask: u32) -> (Graph, usize) {
    let mut edges = vec![(0, 1)];
    let (mut xs, mut ys) = (vec![], vec![]);
    let mut n = 2;
    if on_cycle {
        edges.extend([(1, 2), (2, 3), (3, 0)]);
        xs.push(3);
        ys.push(2);
        n = 4;
    }
    while xs.len() < dx - 1 {
        edges.push((0, n));
        xs.push(n);
        n += 1;
    }
    while ys.len() < dy - 1 {
        edges.push((1, n));
        ys.push(n);
        n += 1;
    }
    let pairs: Vec<(usize, usize)> = xs
        .iter()
        .flat_map(|&a| ys.iter().map(move |&b| (a, b)))
        .filter(|&p| !(on_cycle && p == (3, 2)))
        .collect();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if mask & (1 << i) != 0 {
            edges.extend([(a, n), (n, b)]);
            n += 1;
        }
    }
    (Graph::new(n, edges).unwrap(), pairs.len())
}

/// κ of an edge without 3-cycles depends only on which neighbor pairs are at
/// distance 2, so enumerating every pattern decides each local claim.
#[test]
fn local_patterns_are_exhaustively_sound() {
    let expected_flat = [
        ((2, 2, true), (0, 1)),
        ((2, 3, true), (0, 2)),
        ((2, 4, true), (1, 4)),
        ((3, 3, true), (4, 8)),
        ((3, 4, true), (10, 32)),
        ((4, 4, true), (112, 256)),
        ((2, 2, false), (1, 2)),
        ((2, 3, false), (2, 4)),
        ((2, 4, false), (4, 8)),
        ((3, 3, false), (7, 16)),
        ((3, 4, false), (0, 64)),
        ((4, 4, false), (0, 512)),
    ];
    for ((dx, dy, on), (flat_count, total)) in expected_flat {
        let (_, k) = local_gadget(dx, dy, on, 0);
        assert_eq!(1 << k, total);
        let mut flat = 0;
        for mask in 0..(1u32 << k) {
            let (g, _) = local_gadget(dx, dy, on, mask);
            let kappa = ricci_curvature(&g, 0, 1).unwrap().kappa;
            let compatible = if on {
                assert!(four_cycles_vertex_disjoint(&g));
                classify_four_cycle_edge(&g, 0, 1).unwrap().is_flat_compatible()
            } else {
                !check_lemma2(&g, 0, 1).unwrap().is_violation()
            };
            if kappa.is_zero() {
                flat += 1;
                assert!(compatible, "({dx},{dy}) on={on} mask={mask:b}");
            } else if on {
                assert!(!compatible, "({dx},{dy}) on={on} mask={mask:b} kappa={kappa}");
            }
        }
        assert_eq!(flat, flat_count, "({dx},{dy}) on={on}");
    }
}

#[test]
fn flat_33_edge_on_a_five_cycle() {
    // 1-6 lies on the 4-cycle 1-4-2-6 and the 5-cycle 1-0-5-2-6.
    let g = Graph::new(8, [(0, 1), (0, 5), (1, 4), (1, 6), (2, 4), (2, 5), (2, 6), (3, 6), (5, 7)]).unwrap();
    assert_eq!(edge_cycle_profile(&g, 1, 6).unwrap().five_cycle_count, 1);
    assert!(ricci_curvature(&g, 1, 6).unwrap().kappa.is_zero());
    assert_eq!(classify_four_cycle_edge(&g, 1, 6).unwrap(), FourCycleClass::Deg33);
}

#[test]
fn lemma3_bound_on_random_edges() {
    let mut rng = common::rng(43);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.gen_range(4..=12);
        let extra = rng.gen_range(2..14);
        let g = common::random_triangle_free(&mut rng, n, extra);
        for &(x, y) in g.edges() {
            let p = edge_cycle_profile(&g, x, y).unwrap();
            if p.four_cycle_count != 1 || p.triangle_count != 0 {
                assert!(curvature_upper_bound(&g, x, y).is_err());
                continue;
            }
            let bound = curvature_upper_bound(&g, x, y).unwrap();
            assert_eq!(bound, rat(2, g.degree(x) as i64) + rat(2, g.degree(y) as i64) - int(1));
            assert!(ricci_curvature(&g, x, y).unwrap().kappa <= bound);
            checked += 1;
        }
    }
    let c4 = atlas::cycle(4);
    assert_eq!(curvature_upper_bound(&c4, 0, 1).unwrap(), int(1));
    assert_eq!(ricci_curvature(&c4, 0, 1).unwrap().kappa, int(1));
    let r1 = atlas::r1();
    let (a, b) = {
        let c = four_cycles(&r1)[0];
        (c[0], c[1])
    };
    assert_eq!(curvature_upper_bound(&r1, a, b).unwrap(), int(0));
}
