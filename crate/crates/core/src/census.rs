//! Connected components of a [`SparseGraph`].

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merge the sets of `a` and `b`; false if they were already one set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentStats {
    pub n: usize,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    pub c1: usize,
    /// Second-largest size, 0 when there is a single component.
    pub c2: usize,
    pub giant_fraction: f64,
}

impl ComponentStats {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// `c1 / n^(1/(γ-1))`.
    pub fn normalized_max(&self, gamma: f64) -> f64 {
        self.c1 as f64 / (self.n as f64).powf(1.0 / (gamma - 1.0))
    }
}

/// Partition `g` into connected components by union-find over its edges.
pub fn components(g: &SparseGraph) -> ComponentStats {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    let mut sizes: Vec<usize> = (0..n)
        .filter(|&v| uf.parent[v] as usize == v)
        .map(|r| uf.size[r] as usize)
        .collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let c1 = sizes.first().copied().unwrap_or(0);
    let c2 = sizes.get(1).copied().unwrap_or(0);
    ComponentStats {
        n,
        c1,
        c2,
        giant_fraction: if n == 0 { 0.0 } else { c1 as f64 / n as f64 },
        sizes,
    }
}

/// Size of the component containing `v`, by breadth-first search from `v`.
pub fn cluster_of(g: &SparseGraph, v: usize) -> Result<usize> {
    if v >= g.n() {
        return Err(Error::domain(format!("vertex {v} outside 0..{}", g.n())));
    }
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([v]);
    seen.insert(v);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if seen.insert(y as usize) {
                queue.push_back(y as usize);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SparseGraph {
        SparseGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn isolated_vertices() {
        let s = components(&graph(3, &[]));
        assert_eq!(s.sizes, vec![1, 1, 1]);
        assert_eq!((s.c1, s.c2), (1, 1));
        assert_eq!(cluster_of(&graph(3, &[]), 2).unwrap(), 1);
    }

    #[test]
    fn path_is_one_component() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let s = components(&g);
        assert_eq!(s.sizes, vec![3]);
        assert_eq!((s.c1, s.c2), (3, 0));
        assert_eq!(s.giant_fraction, 1.0);
        for v in 0..3 {
            assert_eq!(cluster_of(&g, v).unwrap(), 3);
        }
    }

    #[test]
    fn two_triangles() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let s = components(&g);
        assert_eq!(s.sizes, vec![3, 3]);
        assert_eq!(s.c2, 3);
        assert_eq!(s.giant_fraction, 0.5);
    }

    #[test]
    fn cluster_of_bounds() {
        let g = graph(4, &[(0, 1)]);
        assert!(cluster_of(&g, 4).is_err());
        assert!(cluster_of(&g, 0).unwrap() > g.degree(0));
    }

    #[test]
    fn union_find_merges() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 4));
        assert_eq!(uf.set_size(3), 4);
        assert_eq!(uf.find(0), uf.find(4));
        assert_ne!(uf.find(2), uf.find(0));
    }

    #[test]
    fn empty_graph() {
        let s = components(&SparseGraph::empty(0).unwrap());
        assert_eq!((s.c1, s.c2, s.giant_fraction), (0, 0, 0.0));
    }
}
