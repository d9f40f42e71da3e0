#![allow(dead_code)]

use chunglu::sampler::{edge_probability, sample_graph};
use chunglu::ModelParams;

/// Edge frequencies of many independent small graphs.
pub struct BruteForce {
    /// Pairs whose frequency is more than 3 standard errors from
    /// `edge_probability`, or differs at all when that is 0 or 1.
    pub single_misses: Vec<String>,
    pub max_single_z: f64,
    /// Largest |z| of a joint frequency against the product of the two
    /// edge probabilities, over all pairs of vertex pairs.
    pub max_joint_z: f64,
    pub joint_exact_misses: usize,
    pub pairs: usize,
}

pub fn brute_force(params: &ModelParams, n: usize, runs: u64, seed0: u64) -> BruteForce {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let probs: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| edge_probability(i + 1, j + 1, params, n).unwrap())
        .collect();
    let k = pairs.len();
    let mut single = vec![0u64; k];
    let mut joint = vec![0u64; k * k];
    let mut present = Vec::with_capacity(k);
    for r in 0..runs {
        let (g, _) = sample_graph(params, n, seed0 + r).unwrap();
        present.clear();
        present.extend(pairs.iter().map(|&(i, j)| g.has_edge(i, j)));
        for a in 0..k {
            if present[a] {
                single[a] += 1;
                for b in a + 1..k {
                    if present[b] {
                        joint[a * k + b] += 1;
                    }
                }
            }
        }
    }

    let rf = runs as f64;
    let mut out = BruteForce {
        single_misses: Vec::new(),
        max_single_z: 0.0,
        max_joint_z: 0.0,
        joint_exact_misses: 0,
        pairs: k,
    };
    for a in 0..k {
        let p = probs[a];
        let freq = single[a] as f64 / rf;
        if p == 1.0 || p == 0.0 {
            if freq != p {
                out.single_misses
                    .push(format!("{:?}: {freq} vs exact {p}", pairs[a]));
            }
            continue;
        }
        let z = (freq - p) / (p * (1.0 - p) / rf).sqrt();
        out.max_single_z = out.max_single_z.max(z.abs());
        if z.abs() > 3.0 {
            out.single_misses
                .push(format!("{:?}: {freq} vs {p} (z = {z:.2})", pairs[a]));
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            let q = probs[a] * probs[b];
            let freq = joint[a * k + b] as f64 / rf;
            if q == 0.0 || q == 1.0 {
                if freq != q {
                    out.joint_exact_misses += 1;
                }
                continue;
            }
            let z = (freq - q) / (q * (1.0 - q) / rf).sqrt();
            out.max_joint_z = out.max_joint_z.max(z.abs());
        }
    }
    out
}

/// |z| bound for the joint frequencies: a family-wise false alarm rate
/// near 1% over a few hundred pairs of pairs.
pub const JOINT_Z_LIMIT: f64 = 4.0;
