//! Chung-Lu random graphs with a power-law rank-1 kernel: analytic giant
//! component theory, an exact sampler, component census, the branching
//! exploration walk and an experiment driver.

// Checks like `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod census;
pub mod error;
pub mod experiment;
pub mod exploration;
pub mod graph;
pub mod kernel;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use census::{cluster_of, components, ComponentStats};
pub use error::{Error, Result};
pub use exploration::{
    explore, sample_offspring, sample_size_biased_type, ExplorationOutcome, Root,
};
pub use graph::SparseGraph;
pub use kernel::{solve_a_theta, FixedPointSolution, ModelParams, Variant};
pub use quadrature::QuadratureConfig;
pub use sampler::{edge_probability, sample_graph, SamplerReport};
