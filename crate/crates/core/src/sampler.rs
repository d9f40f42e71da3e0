//! Sampling `G(n, p_ij)` with `p_ij = min(1, κ(i/n, j/n)/n)`, vertices
//! `i = 1..n` (stored 0-based).
//!
//! Weights `ψ(i/n)` decrease in `i`, so for a fixed source `i` the
//! probabilities `p_ij` decrease along `j > i`. The sampler walks `j`
//! upward holding the bound `p̂ = p_{i,j}` at the next unvisited position,
//! jumps ahead by a geometric(`p̂`) number of positions and keeps the
//! candidate it lands on with probability `p_{i,j'}/p̂`. The bound is then
//! refreshed at the following position. Expected work is `O(n + m)`.
//!
//! Source `i` draws from ChaCha stream `i` of the seed, so blocks of
//! sources are generated in parallel and concatenated in source order;
//! the edge set does not depend on the thread count.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::kernel::{ModelParams, Variant};
use crate::rng::{StreamFactory, StreamRng};

const BLOCK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerReport {
    pub n: usize,
    pub m: usize,
    pub theta: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Pairs whose raw kernel value `κ/n` was at least 1 before clamping.
    pub capped_pairs: u64,
    /// Positions at which an accept/reject test was made.
    pub candidates: u64,
    pub elapsed_secs: f64,
}

impl SamplerReport {
    pub fn capped(&self) -> bool {
        self.capped_pairs > 0
    }
}

/// Raw `κ(i/n, j/n)/n` for 1-based indices, computed from a weight table.
struct PairKernel {
    scale: f64,
    weights: Option<Vec<f64>>,
}

impl PairKernel {
    fn new(params: &ModelParams, n: usize) -> Result<Self> {
        params.validate()?;
        let nf = n as f64;
        match params.variant {
            Variant::ErdosRenyi { lambda } => Ok(PairKernel {
                scale: lambda / nf,
                weights: None,
            }),
            Variant::ChungLu => {
                let e = -1.0 / (params.gamma - 1.0);
                let mut weights = Vec::new();
                weights
                    .try_reserve_exact(n)
                    .map_err(|err| Error::Capacity(format!("weight table for n = {n}: {err}")))?;
                weights.extend((1..=n).map(|i| (i as f64 / nf).powf(e)));
                Ok(PairKernel {
                    scale: params.theta / nf,
                    weights: Some(weights),
                })
            }
        }
    }

    #[inline]
    fn raw(&self, i: usize, j: usize) -> f64 {
        match &self.weights {
            Some(w) => self.scale * w[i - 1] * w[j - 1],
            None => self.scale,
        }
    }
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::domain(format!(
            "vertex indices ({i}, {j}) outside 1..={n}"
        )));
    }
    if i == j {
        return Err(Error::domain(format!("no self-pair ({i}, {i})")));
    }
    Ok(())
}

/// `min(1, κ(i/n, j/n)/n)` for distinct 1-based vertices `i`, `j`.
pub fn edge_probability(i: usize, j: usize, params: &ModelParams, n: usize) -> Result<f64> {
    check_pair(i, j, n)?;
    params.validate()?;
    let nf = n as f64;
    let raw = params.kernel(i as f64 / nf, j as f64 / nf) / nf;
    Ok(raw.min(1.0))
}

#[derive(Default)]
struct BlockOutput {
    edges: Vec<(u32, u32)>,
    capped: u64,
    candidates: u64,
}

fn sample_source(
    kernel: &PairKernel,
    i: usize,
    n: usize,
    rng: &mut StreamRng,
    out: &mut BlockOutput,
) {
    let mut j = i + 1;
    while j <= n {
        let bound = kernel.raw(i, j).min(1.0);
        if bound <= 0.0 {
            break;
        }
        if bound < 1.0 {
            // r in (0, 1]; positions skipped before the next candidate
            let r = 1.0 - rng.random::<f64>();
            let skip = (r.ln() / (-bound).ln_1p()).floor();
            if skip >= (n - j + 1) as f64 {
                break;
            }
            j += skip as usize;
        }
        out.candidates += 1;
        let raw = kernel.raw(i, j);
        if raw >= 1.0 {
            out.capped += 1;
        }
        let p = raw.min(1.0);
        if p >= bound || rng.random::<f64>() * bound < p {
            out.edges.push(((i - 1) as u32, (j - 1) as u32));
        }
        j += 1;
    }
}

/// Sample one graph. Identical `(params, n, seed)` give identical graphs.
pub fn sample_graph(
    params: &ModelParams,
    n: usize,
    seed: u64,
) -> Result<(SparseGraph, SamplerReport)> {
    let start = Instant::now();
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if n > u32::MAX as usize {
        return Err(Error::Capacity(format!(
            "{n} vertices exceed the 32-bit vertex index range"
        )));
    }
    let kernel = PairKernel::new(params, n)?;
    let streams = StreamFactory::new(seed);

    let blocks: Vec<BlockOutput> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut out = BlockOutput::default();
            let first = b * BLOCK + 1;
            let last = ((b + 1) * BLOCK).min(n);
            for i in first..=last {
                let mut rng = streams.stream(i as u64);
                sample_source(&kernel, i, n, &mut rng, &mut out);
            }
            out
        })
        .collect();

    let m: usize = blocks.iter().map(|b| b.edges.len()).sum();
    let mut edges = Vec::new();
    edges
        .try_reserve_exact(m)
        .map_err(|err| Error::Capacity(format!("edge buffer of length {m}: {err}")))?;
    let (mut capped, mut candidates) = (0, 0);
    for block in blocks {
        edges.extend_from_slice(&block.edges);
        capped += block.capped;
        candidates += block.candidates;
    }
    let graph = SparseGraph::from_sorted_edges(n, &edges)?;
    drop(edges);

    let report = SamplerReport {
        n,
        m,
        theta: params.theta,
        gamma: params.gamma,
        seed,
        capped_pairs: capped,
        candidates,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    Ok((graph, report))
}
