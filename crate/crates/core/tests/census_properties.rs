use std::collections::{BTreeSet, VecDeque};

use chunglu::census::{cluster_of, components};
use chunglu::{sample_graph, ModelParams, SparseGraph};
use proptest::prelude::*;

/// Component sizes by plain BFS over an adjacency list built from scratch.
fn bfs_sizes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(x) = queue.pop_front() {
            size += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn edge_set() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..60).prop_flat_map(|n| {
        // v skips u, so no self-loops are generated
        let pair = (0..n, 0..n - 1).prop_map(|(u, v)| {
            let v = if v >= u { v + 1 } else { v };
            (u.min(v), u.max(v))
        });
        (Just(n), proptest::collection::vec(pair, 0..120)).prop_map(|(n, pairs)| {
            let set: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
            (n, set.into_iter().collect())
        })
    })
}

proptest! {
    #[test]
    fn union_find_agrees_with_bfs((n, edges) in edge_set()) {
        let g = SparseGraph::from_edges(n, edges.iter().copied()).unwrap();
        let stats = components(&g);
        prop_assert_eq!(&stats.sizes, &bfs_sizes(n, &edges));
        prop_assert_eq!(stats.sizes.iter().sum::<usize>(), n);
        prop_assert!(stats.c1 >= stats.c2);
        prop_assert!((0.0..=1.0).contains(&stats.giant_fraction));
        for v in 0..n {
            let c = cluster_of(&g, v).unwrap();
            prop_assert!(c > g.degree(v) && c <= stats.c1);
        }
    }

    #[test]
    fn adding_an_edge_never_splits((n, edges) in edge_set(), a in 0usize..60, b in 0usize..60) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let g = SparseGraph::from_edges(n, edges.iter().copied()).unwrap();
        let mut more = edges.clone();
        let e = (a.min(b), a.max(b));
        if !more.contains(&e) {
            more.push(e);
        }
        let h = SparseGraph::from_edges(n, more.iter().copied()).unwrap();
        let (s, t) = (components(&g), components(&h));
        prop_assert!(t.c1 >= s.c1);
        prop_assert!(t.component_count() <= s.component_count());
        prop_assert!(s.component_count() - t.component_count() <= 1);
    }

    #[test]
    fn edge_list_round_trip((n, edges) in edge_set()) {
        let g = SparseGraph::from_edges(n, edges.iter().copied()).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = SparseGraph::read_edge_list(&buf[..]).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), edges);
        let degree_sum: usize = g.degree_sequence().iter().sum();
        prop_assert_eq!(degree_sum, 2 * g.m());
    }
}

#[test]
fn sampled_graphs_agree_with_bfs() {
    let models = [
        ModelParams::chung_lu(2.5, 0.8).unwrap(),
        ModelParams::chung_lu(4.0, 0.3).unwrap(),
        ModelParams::chung_lu(3.0, 1.5).unwrap(),
        ModelParams::erdos_renyi(1.0).unwrap(),
    ];
    for r in 0..100u64 {
        let p = &models[r as usize % models.len()];
        let n = 200 + 37 * r as usize;
        let (g, _) = sample_graph(p, n, r).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let stats = components(&g);
        assert_eq!(stats.sizes, bfs_sizes(n, &edges), "graph {r}");
        assert!(cluster_of(&g, 0).unwrap() <= stats.c1);
    }
}
