//! Spectral detection of communities and anti-communities in undirected
//! weighted graphs via generalized modularity matrices.
//!
//! The crate provides:
//!
//! - a sparse immutable [`graph::Graph`] model with node sets and partitions;
//! - modularity Q(C), normalized modularity q(C), measure vectors, and
//!   matrix-free modularity operators ([`modularity`]);
//! - an eigenvalue engine with a dense path and a thick-restart Lanczos
//!   path, plus singular values and low-rank truncation ([`spectral`]);
//! - Frobenius matrix angles, projections onto the spaces spanned by
//!   frames, and evaluators for the eigenvalue/eigenspace approximation
//!   bounds ([`subspace`]);
//! - exact spectral analysis of stochastic block models and a seeded
//!   sampler ([`sbm`]);
//! - the end-to-end detection pipeline: spectrum, ratio-based k selection,
//!   spectral embedding, seeded k-means, and cluster classification
//!   ([`detect`]);
//! - file formats and report serialization ([`io`]);
//! - randomized self-validation suites ([`validate`]).

pub mod detect;
pub mod error;
pub mod graph;
pub mod io;
pub mod modularity;
pub mod sbm;
pub mod spectral;
pub mod subspace;
pub mod validate;

// Re-exported because DMatrix appears in public signatures.
pub use nalgebra;

pub use error::{Error, Result};
pub use graph::{build_graph, characteristic_vector, volume, Graph, NodeSet, Partition};
pub use modularity::{
    measure_vector, modularity, normalized_modularity, rayleigh_quotient, MeasurePolicy,
    ModularityOperator,
};
pub use spectral::{
    dominant_eigenpairs, full_symmetric_eig, low_rank_truncation, singular_values,
    DenseOperator, SpectralSummary, SymmetricOperator,
};
