//! Shared fixtures for the pipeline benchmarks.

use antimod_core::graph::Graph;
use antimod_core::nalgebra::DMatrix;
use antimod_core::sbm::{sample, SbmSpec};

/// A planted assortative graph: `blocks` equal blocks of `size` nodes,
/// within-block probability 0.3, cross-block 0.02.
pub fn assortative_graph(blocks: usize, size: usize, seed: u64) -> Graph {
    let b = DMatrix::from_fn(blocks, blocks, |i, j| if i == j { 0.3 } else { 0.02 });
    let spec = SbmSpec::new(vec![size; blocks], b).expect("valid benchmark spec");
    sample(&spec, seed).expect("sampling a valid spec")
}
