//! Immutable undirected simple graph in compressed adjacency form, and the
//! text edge-list format.
//!
//! Edge-list format: line 1 is `<n> <m>`, followed by exactly `m` lines
//! `<u> <v>` with `0 <= u < v < n` in ascending lexicographic order. ASCII
//! decimal, every line terminated by LF.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

fn reserve<T>(len: usize, what: &str) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|e| Error::Capacity(format!("{what} of length {len}: {e}")))?;
    Ok(v)
}

impl SparseGraph {
    /// Graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_sorted_edges(n, &[])
    }

    /// Build from edges `(u, v)` with `u < v`, sorted lexicographically and
    /// free of duplicates. Callers that cannot promise this use
    /// [`SparseGraph::from_edges`].
    pub(crate) fn from_sorted_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "{n} vertices exceed the 32-bit vertex index range"
            )));
        }
        let mut offsets = reserve::<usize>(n + 1, "offset table")?;
        offsets.resize(n + 1, 0);
        for &(u, v) in edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut neighbors = reserve::<u32>(2 * edges.len(), "adjacency")?;
        neighbors.resize(2 * edges.len(), 0);
        let mut cursor = offsets.clone();
        // Lexicographic edge order fills each list in ascending order: the
        // smaller neighbours arrive while their own rows are processed,
        // before the row of the vertex itself.
        for &(u, v) in edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Ok(SparseGraph {
            n,
            offsets,
            neighbors,
        })
    }

    /// Build from arbitrary undirected edges. Self-loops, out-of-range
    /// endpoints and repeated edges are integrity errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Integrity(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::Integrity(format!("self-loop at vertex {a}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push((u as u32, v as u32));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Integrity(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Self::from_sorted_edges(n, &list)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v` in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            n: self.n,
            m: self.m(),
            max_degree: self.max_degree(),
        }
    }

    pub fn write_edge_list<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {}", self.n, self.m())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.split(b'\n');
        let header = match lines.next() {
            Some(line) => line?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing header".into(),
                })
            }
        };
        let (n, m) = parse_pair(&header, 1)?;
        if n > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "{n} vertices exceed the 32-bit vertex index range"
            )));
        }

        let mut edges: Vec<(u32, u32)> = reserve(m.min(1 << 26), "edge buffer")?;
        let mut prev: Option<(usize, usize)> = None;
        let mut line_no = 1;
        for line in lines {
            let line = line?;
            line_no += 1;
            let (u, v) = parse_pair(&line, line_no)?;
            if edges.len() == m {
                return Err(Error::Integrity(format!(
                    "header declares {m} edges but line {line_no} holds another"
                )));
            }
            if !(u < v && v < n) {
                return Err(Error::Integrity(format!(
                    "line {line_no}: edge ({u}, {v}) violates 0 <= u < v < {n}"
                )));
            }
            if let Some(p) = prev {
                if (u, v) <= p {
                    return Err(Error::Integrity(format!(
                        "line {line_no}: edge ({u}, {v}) is not after ({}, {})",
                        p.0, p.1
                    )));
                }
            }
            prev = Some((u, v));
            edges.push((u as u32, v as u32));
        }
        if edges.len() != m {
            return Err(Error::Integrity(format!(
                "header declares {m} edges, file holds {}",
                edges.len()
            )));
        }
        Self::from_sorted_edges(n, &edges)
    }

    pub fn write_edge_list_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_edge_list(File::create(path)?)
    }

    pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_edge_list(BufReader::new(File::open(path)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
}

fn parse_pair(line: &[u8], line_no: usize) -> Result<(usize, usize)> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let text = std::str::from_utf8(line).map_err(|_| err("not ASCII".into()))?;
    let mut parts = text.split(' ');
    let mut field = |name: &str| -> Result<usize> {
        let tok = parts.next().ok_or_else(|| err(format!("missing {name}")))?;
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(format!("{name} {tok:?} is not a decimal integer")));
        }
        tok.parse::<usize>()
            .map_err(|e| err(format!("{name} {tok:?}: {e}")))
    };
    let a = field("first field")?;
    let b = field("second field")?;
    if let Some(extra) = parts.next() {
        return Err(err(format!("unexpected trailing field {extra:?}")));
    }
    Ok((a, b))
}
