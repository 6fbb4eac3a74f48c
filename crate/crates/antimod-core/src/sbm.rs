//! Stochastic block models: average adjacency/modularity matrices,
//! inflation products, the reduced k×k spectral equivalents, lifted
//! eigenvectors, and a seeded counter-based sampler.

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Block sizes plus the symmetric k×k connectivity matrix B.
///
/// In the default probability mode all entries must lie in [0, 1] and the
/// model can be sampled. The analysis-only "average weight" mode lifts the
/// range restriction (B is then an expected-weight matrix); sampling is
/// disabled there.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    sizes: Vec<usize>,
    b: DMatrix<f64>,
    average_weight: bool,
}

impl SbmSpec {
    pub fn new(sizes: Vec<usize>, b: DMatrix<f64>) -> Result<SbmSpec> {
        let spec = SbmSpec::validate(sizes, b, false)?;
        Ok(spec)
    }

    /// Analysis-only mode: entries of B may exceed 1 (expected weights).
    pub fn new_average_weight(sizes: Vec<usize>, b: DMatrix<f64>) -> Result<SbmSpec> {
        SbmSpec::validate(sizes, b, true)
    }

    fn validate(sizes: Vec<usize>, b: DMatrix<f64>, average_weight: bool) -> Result<SbmSpec> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpec("no blocks".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidSpec("all block sizes must be >= 1".into()));
        }
        let k = sizes.len();
        if b.nrows() != k || b.ncols() != k {
            return Err(Error::InvalidSpec(format!(
                "connectivity matrix is {}x{}, expected {k}x{k}",
                b.nrows(),
                b.ncols()
            )));
        }
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..k {
            for j in (i + 1)..k {
                if (b[(i, j)] - b[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "connectivity matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if !average_weight {
            for i in 0..k {
                for j in 0..k {
                    let v = b[(i, j)];
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::ProbabilityOutOfRange { i, j, value: v });
                    }
                }
            }
        }
        Ok(SbmSpec {
            sizes,
            b,
            average_weight,
        })
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn connectivity(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn is_average_weight(&self) -> bool {
        self.average_weight
    }

    /// Per-node block labels; blocks are consecutive index ranges.
    pub fn block_labels(&self) -> Vec<usize> {
        let mut labels = Vec::with_capacity(self.n());
        for (block, &s) in self.sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(block).take(s));
        }
        labels
    }
}

/// Expected degrees δ_i = Σ_j b_ij n_j, expected volume ν = Σ_ij b_ij n_i n_j,
/// and the reduced k×k matrices that carry all nonzero eigenvalues of the
/// average modularity matrices.
#[derive(Debug, Clone)]
pub struct SbmAverages {
    pub delta: Vec<f64>,
    pub nu: f64,
    /// N(B − δδ^T/ν)N with N = diag(√n_i).
    pub reduced: DMatrix<f64>,
    /// NΔ^{-1/2}(B − δδ^T/ν)Δ^{-1/2}N; present when every δ_i > 0.
    pub reduced_normalized: Option<DMatrix<f64>>,
}

fn deltas_and_nu(spec: &SbmSpec) -> (Vec<f64>, f64) {
    let k = spec.k();
    let b = spec.connectivity();
    let delta: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| b[(i, j)] * spec.sizes()[j] as f64).sum())
        .collect();
    let nu = delta
        .iter()
        .zip(spec.sizes())
        .map(|(d, &n)| d * n as f64)
        .sum();
    (delta, nu)
}

/// Average adjacency Ā: block (i, j) is the constant b_ij matrix of shape
/// n_i×n_j.
pub fn average_adjacency(spec: &SbmSpec) -> DMatrix<f64> {
    let labels = spec.block_labels();
    let n = spec.n();
    DMatrix::from_fn(n, n, |u, v| spec.connectivity()[(labels[u], labels[v])])
}

/// Average modularity matrix: block (i, j) constant b_ij − δ_iδ_j/ν, or its
/// normalized variant with blocks (b_ij − δ_iδ_j/ν)/√(δ_iδ_j).
pub fn average_modularity(spec: &SbmSpec, normalized: bool) -> Result<DMatrix<f64>> {
    let (delta, nu) = deltas_and_nu(spec);
    if nu <= 0.0 {
        return Err(Error::ZeroNu);
    }
    if normalized {
        if let Some(block) = delta.iter().position(|&d| d <= 0.0) {
            return Err(Error::ZeroDelta { block });
        }
    }
    let labels = spec.block_labels();
    let b = spec.connectivity();
    let n = spec.n();
    Ok(DMatrix::from_fn(n, n, |u, v| {
        let (i, j) = (labels[u], labels[v]);
        let z = b[(i, j)] - delta[i] * delta[j] / nu;
        if normalized {
            z / (delta[i] * delta[j]).sqrt()
        } else {
            z
        }
    }))
}

fn block_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for &s in sizes {
        acc += s;
        offsets.push(acc);
    }
    offsets
}

/// Inflation product B ×× A: block (i, j) of the partitioned matrix A is
/// scaled by b_ij. When all blocks of A are equal and sizes match, this is
/// the Kronecker product B ⊗ A_11.
pub fn inflation(b: &DMatrix<f64>, a: &DMatrix<f64>, sizes: &[usize]) -> Result<DMatrix<f64>> {
    let k = sizes.len();
    let n: usize = sizes.iter().sum();
    if b.nrows() != k || b.ncols() != k || a.nrows() != n || a.ncols() != n {
        return Err(Error::NonconformalPartition);
    }
    let offsets = block_offsets(sizes);
    let mut out = a.clone();
    for i in 0..k {
        for j in 0..k {
            let scale = b[(i, j)];
            for u in offsets[i]..offsets[i + 1] {
                for v in offsets[j]..offsets[j + 1] {
                    out[(u, v)] *= scale;
                }
            }
        }
    }
    Ok(out)
}

/// Vector inflation v ×× w: sub-vector j of the partitioned w is scaled by
/// v_j.
pub fn inflation_vec(v: &[f64], w: &[f64], sizes: &[usize]) -> Result<Vec<f64>> {
    let n: usize = sizes.iter().sum();
    if v.len() != sizes.len() || w.len() != n {
        return Err(Error::NonconformalPartition);
    }
    let mut out = Vec::with_capacity(n);
    for (j, &s) in sizes.iter().enumerate() {
        let start = out.len();
        out.extend_from_slice(&w[start..start + s]);
        for x in &mut out[start..] {
            *x *= v[j];
        }
    }
    Ok(out)
}

/// Reduced k×k spectral equivalents of the average modularity matrices.
pub fn reduced_modularity(spec: &SbmSpec, normalized: bool) -> Result<SbmAverages> {
    let (delta, nu) = deltas_and_nu(spec);
    if nu <= 0.0 {
        return Err(Error::ZeroNu);
    }
    let k = spec.k();
    let b = spec.connectivity();
    let z = DMatrix::from_fn(k, k, |i, j| b[(i, j)] - delta[i] * delta[j] / nu);
    let sqrt_sizes: Vec<f64> = spec.sizes().iter().map(|&n| (n as f64).sqrt()).collect();
    let reduced = DMatrix::from_fn(k, k, |i, j| sqrt_sizes[i] * sqrt_sizes[j] * z[(i, j)]);

    let reduced_normalized = if delta.iter().all(|&d| d > 0.0) {
        Some(DMatrix::from_fn(k, k, |i, j| {
            reduced[(i, j)] / (delta[i] * delta[j]).sqrt()
        }))
    } else {
        if normalized {
            let block = delta.iter().position(|&d| d <= 0.0).unwrap();
            return Err(Error::ZeroDelta { block });
        }
        None
    };

    Ok(SbmAverages {
        delta,
        nu,
        reduced,
        reduced_normalized,
    })
}

/// Lifts a reduced-matrix eigenvector v to the full space:
/// z = N^{-1} v ×× 1, i.e. block j of z is constant v_j/√n_j. Norm is
/// preserved, and reduced eigenpairs lift to eigenpairs of the average
/// modularity matrix.
pub fn lift_eigenvector(v: &[f64], spec: &SbmSpec) -> Result<Vec<f64>> {
    if v.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            got: v.len(),
        });
    }
    let mut z = Vec::with_capacity(spec.n());
    for (j, &s) in spec.sizes().iter().enumerate() {
        let val = v[j] / (s as f64).sqrt();
        z.extend(std::iter::repeat(val).take(s));
    }
    Ok(z)
}

fn u64_to_unit(x: u64) -> f64 {
    // 53 uniform mantissa bits in [0, 1)
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples a simple undirected graph from the block model: each unordered
/// pair {u, v}, u ≠ v, is an edge with probability b_ij independently; no
/// self-loops.
///
/// Randomness is counter-based: pair p consumes the two 32-bit words at
/// stream position 2p of a ChaCha stream keyed by the seed, so the result
/// is deterministic for a seed and independent of evaluation order or
/// parallel chunking.
pub fn sample(spec: &SbmSpec, seed: u64) -> Result<Graph> {
    if spec.is_average_weight() {
        // locate the offending entry for the error message
        for i in 0..spec.k() {
            for j in 0..spec.k() {
                let v = spec.connectivity()[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ProbabilityOutOfRange { i, j, value: v });
                }
            }
        }
    }
    let n = spec.n();
    let labels = spec.block_labels();
    let b = spec.connectivity();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut pair_index: u128 = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            let p = b[(labels[u], labels[v])];
            if p > 0.0 {
                rng.set_word_pos(pair_index * 2);
                if u64_to_unit(rng.next_u64()) < p {
                    edges.push((u, v, 1.0));
                }
            }
            pair_index += 1;
        }
    }
    Graph::build(n, &edges)
}

/// Relabels the nodes of a graph by a permutation: node i becomes
/// perm[i]. Useful for shuffled-label experiments on block models, whose
/// blocks are otherwise consecutive index ranges.
pub fn permute_graph(g: &Graph, perm: &[usize]) -> Result<Graph> {
    let n = g.n();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, n });
        }
        if seen[p] {
            return Err(Error::InvalidConfig(format!(
                "permutation repeats index {p}"
            )));
        }
        seen[p] = true;
    }
    let edges: Vec<(usize, usize, f64)> = g
        .undirected_edges()
        .map(|(i, j, w)| (perm[i], perm[j], w))
        .collect();
    Graph::build(n, &edges)
}
