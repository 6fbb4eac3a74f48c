//! End-to-end detection pipeline: dominant spectrum → eigenvalue-ratio k
//! selection → scaled row embedding → seeded k-means into k or k+1 groups →
//! community / anti-community / background classification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::modularity::{modularity, normalized_modularity, MeasurePolicy, ModularityOperator};
use crate::spectral::{dominant_eigenpairs, SpectralSummary, DEFAULT_TOL};

/// How many eigenvectors to embed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSelection {
    /// Pick k from the eigenvalue ratios r_i = |λ_i|/|λ_{i+1}|.
    Auto,
    /// Use exactly this many eigenvectors.
    Explicit(usize),
}

/// Number of k-means groups relative to the embedding width k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClustersMode {
    /// k+1 groups: one extra cluster to absorb background nodes.
    KPlusOne,
    /// exactly k groups, no background cluster is designated.
    K,
}

impl std::fmt::Display for ClustersMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClustersMode::KPlusOne => write!(f, "k_plus_one"),
            ClustersMode::K => write!(f, "k"),
        }
    }
}

/// Tunables for [`detect`]. `Default` gives the documented defaults; call
/// [`DetectionConfig::validate`] after hand-editing fields.
#[derive(Debug, Clone)]
pub struct DetectionConfig {
    pub measure: MeasurePolicy,
    pub k: KSelection,
    /// Upper bound for automatic k; clamped to n−1 per graph.
    pub max_k: usize,
    /// A ratio r_i ≥ this threshold marks λ_i as separated from the tail.
    pub ratio_threshold: f64,
    pub clusters: ClustersMode,
    /// Divide embedding row i by √μ(i).
    pub scale_rows: bool,
    pub seed: u64,
    /// k-means restarts; best run by within-cluster sum of squares.
    pub restarts: usize,
    /// Relative tolerance for eigensolver convergence and zero-eigenvalue
    /// detection in the ratio rule.
    pub tol: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            measure: MeasurePolicy::Unit,
            k: KSelection::Auto,
            max_k: 20,
            ratio_threshold: 1.25,
            clusters: ClustersMode::KPlusOne,
            scale_rows: true,
            seed: 0,
            restarts: 50,
            tol: DEFAULT_TOL,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_k == 0 {
            return Err(Error::InvalidConfig("max_k must be at least 1".into()));
        }
        if !(self.ratio_threshold > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ratio_threshold must exceed 1, got {}",
                self.ratio_threshold
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol must be nonnegative, got {}",
                self.tol
            )));
        }
        if let KSelection::Explicit(k) = self.k {
            if k == 0 {
                return Err(Error::InvalidConfig("explicit k must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// How a cluster relates to the modularity structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Community,
    AntiCommunity,
    Background,
    /// q(C) undefined because the cluster has zero measure.
    Unclassified,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Community => "community",
            Classification::AntiCommunity => "anti-community",
            Classification::Background => "background",
            Classification::Unclassified => "unclassified",
        };
        write!(f, "{s}")
    }
}

/// Per-cluster summary. Q and q are recomputed from the graph, never from
/// spectral quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterInfo {
    pub id: usize,
    /// Sorted node indices.
    pub members: Vec<usize>,
    pub size: usize,
    /// Modularity Q(C).
    pub modularity: f64,
    /// Normalized modularity q(C) = Q(C)/μ(C); `None` when μ(C) = 0.
    pub normalized_modularity: Option<f64>,
    pub classification: Classification,
}

/// Everything the pipeline produced: the spectrum actually used, the ratio
/// diagnostics behind the k choice, and the classified clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub n: usize,
    pub num_edges: usize,
    pub measure: MeasurePolicy,
    pub seed: u64,
    pub k_selected: usize,
    pub clusters_mode: ClustersMode,
    /// Modulus-sorted eigenvalues computed for the ratio rule (k+1 ≤ len).
    pub eigenvalues: Vec<f64>,
    /// r_i = |λ_i|/|λ_{i+1}|; may contain +∞ where the tail is numerically
    /// zero. Empty for single-node graphs.
    pub ratios: Vec<f64>,
    pub clusters: Vec<ClusterInfo>,
    /// Within-cluster sum of squares of the winning k-means restart.
    pub wcss: f64,
}

/// Eigenvalue separation ratios r_i = |λ_i|/|λ_{i+1}| for i = 1..min(max_k,
/// m−1), given modulus-sorted eigenvalues.
///
/// A tail eigenvalue with |λ_{i+1}| ≤ tol·|λ_1| makes the ratio +∞ (perfect
/// separation) — unless |λ_i| is itself below that cutoff, in which case
/// both are numerically zero and the ratio is reported as 1 (no
/// separation).
pub fn spectrum_ratios(lambdas: &[f64], max_k: usize, tol: f64) -> Result<Vec<f64>> {
    if lambdas.len() < 2 {
        return Err(Error::TooFewEigenvalues);
    }
    let cutoff = tol * lambdas[0].abs();
    let count = max_k.min(lambdas.len() - 1);
    let mut ratios = Vec::with_capacity(count);
    for i in 0..count {
        let hi = lambdas[i].abs();
        let lo = lambdas[i + 1].abs();
        let r = if lo > cutoff {
            hi / lo
        } else if hi > cutoff {
            f64::INFINITY
        } else {
            1.0
        };
        ratios.push(r);
    }
    Ok(ratios)
}

/// Picks the embedding width: explicit mode returns the configured k; auto
/// mode returns the largest index whose ratio clears the threshold, falling
/// back to the argmax ratio (ties to the lowest index) when none does.
pub fn select_k(ratios: &[f64], cfg: &DetectionConfig) -> usize {
    if let KSelection::Explicit(k) = cfg.k {
        return k;
    }
    let limit = ratios.len().min(cfg.max_k);
    let mut last_standing = None;
    for (i, &r) in ratios[..limit].iter().enumerate() {
        if r >= cfg.ratio_threshold {
            last_standing = Some(i + 1);
        }
    }
    last_standing.unwrap_or_else(|| {
        let mut best = 0;
        for (i, &r) in ratios[..limit].iter().enumerate() {
            if r > ratios[best] {
                best = i;
            }
        }
        best + 1
    })
}

/// Rows of U_k as an n×k embedding, row i divided by √μ(i) when scaling is
/// on. The scaled rows of an exact block-model embedding are constant
/// within blocks.
pub fn embed_nodes(
    spectrum: &SpectralSummary,
    k: usize,
    measures: &[f64],
    scale_rows: bool,
) -> Result<Vec<Vec<f64>>> {
    if k == 0 || k > spectrum.converged {
        return Err(Error::InsufficientSpectrum);
    }
    let n = spectrum.vectors.nrows();
    if measures.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: measures.len(),
        });
    }
    let mut rows = vec![vec![0.0; k]; n];
    for i in 0..n {
        let scale = if scale_rows {
            1.0 / measures[i].sqrt()
        } else {
            1.0
        };
        for j in 0..k {
            rows[i][j] = spectrum.vectors[(i, j)] * scale;
        }
    }
    Ok(rows)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One k-means run: probabilistic farthest-point (D²) seeding, Lloyd
/// iterations with ties to the lowest centroid index, empty clusters
/// re-seeded from the point farthest from its centroid.
fn kmeans_single(rows: &[Vec<f64>], groups: usize, rng: &mut ChaCha12Rng) -> (Vec<usize>, f64) {
    let n = rows.len();
    let dim = rows[0].len();

    // D² seeding
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(groups);
    centroids.push(rows[rng.gen_range(0..n)].clone());
    let mut min_d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < groups {
        let total: f64 = min_d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in min_d2.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.push(rows[next].clone());
        for (i, d) in min_d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(&rows[i], centroids.last().unwrap()));
        }
    }

    let mut labels = vec![0usize; n];
    for _ in 0..100 {
        // assign
        let mut changed = false;
        for (i, row) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = sq_dist(row, &centroids[0]);
            for (c, cent) in centroids.iter().enumerate().skip(1) {
                let d = sq_dist(row, cent);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }

        // update
        let mut counts = vec![0usize; groups];
        let mut sums = vec![vec![0.0; dim]; groups];
        for (i, row) in rows.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, &x) in sums[labels[i]].iter_mut().zip(row) {
                *s += x;
            }
        }
        for c in 0..groups {
            if counts[c] > 0 {
                for s in &mut sums[c] {
                    *s /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            } else {
                // re-seed from the point farthest from its current centroid
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(&rows[a], &centroids[labels[a]])
                            .partial_cmp(&sq_dist(&rows[b], &centroids[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[c] = rows[far].clone();
                labels[far] = c;
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }

    let wcss = rows
        .iter()
        .zip(&labels)
        .map(|(row, &c)| sq_dist(row, &centroids[c]))
        .sum();
    (labels, wcss)
}

/// Best-of-`restarts` k-means, returning the winning labeling and its
/// within-cluster sum of squares. Restart r draws from stream r of a
/// ChaCha generator keyed by the seed, so the result does not depend on
/// how restarts are scheduled; ties go to the lowest restart index.
pub fn cluster_rows_with_objective(
    rows: &[Vec<f64>],
    groups: usize,
    seed: u64,
    restarts: usize,
) -> Result<(Partition, f64)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::ZeroNodes);
    }
    if groups == 0 || groups > n {
        return Err(Error::TooManyGroups { groups, n });
    }
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    let runs: Vec<(Vec<usize>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            kmeans_single(rows, groups, &mut rng)
        })
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, (_, a)), (j, (_, b))| a.partial_cmp(b).unwrap().then(i.cmp(j)))
        .map(|(i, _)| i)
        .unwrap();
    let (labels, wcss) = &runs[best];
    Ok((Partition::from_labels(labels), *wcss))
}

/// [`cluster_rows_with_objective`] without the objective value.
pub fn cluster_rows(
    rows: &[Vec<f64>],
    groups: usize,
    seed: u64,
    restarts: usize,
) -> Result<Partition> {
    cluster_rows_with_objective(rows, groups, seed, restarts).map(|(p, _)| p)
}

/// Computes Q and q per cluster and classifies each one. In k+1 mode the
/// largest cluster (ties to the lowest id) is the background — block-model
/// background blocks dominate the leftover group — and the rest are
/// communities (q > 0) or anti-communities (q ≤ 0). A zero-measure cluster
/// gets no q and stays unclassified.
pub fn classify_clusters(
    g: &Graph,
    partition: &Partition,
    policy: MeasurePolicy,
    mode: ClustersMode,
) -> Result<Vec<ClusterInfo>> {
    if !partition.covers_all() || partition.n() != g.n() {
        return Err(Error::NonconformalPartition);
    }
    let parts = partition.parts();
    let background = match mode {
        ClustersMode::KPlusOne => {
            let mut best = 0;
            for (id, c) in parts.iter().enumerate() {
                if c.len() > parts[best].len() {
                    best = id;
                }
            }
            Some(best)
        }
        ClustersMode::K => None,
    };
    let mut out = Vec::with_capacity(parts.len());
    for (id, c) in parts.iter().enumerate() {
        let q_big = modularity(g, c)?;
        let q_norm = match normalized_modularity(g, c, policy) {
            Ok(q) => Some(q),
            Err(Error::ZeroMeasure(_)) => None,
            Err(e) => return Err(e),
        };
        let classification = if background == Some(id) {
            Classification::Background
        } else {
            match q_norm {
                Some(q) if q > 0.0 => Classification::Community,
                Some(_) => Classification::AntiCommunity,
                None => Classification::Unclassified,
            }
        };
        out.push(ClusterInfo {
            id,
            members: c.members().to_vec(),
            size: c.len(),
            modularity: q_big,
            normalized_modularity: q_norm,
            classification,
        });
    }
    Ok(out)
}

/// Runs the whole pipeline on a graph. Deterministic for a fixed (graph,
/// config): the eigensolver, the ratio rule, and every k-means restart are
/// seeded.
pub fn detect(g: &Graph, cfg: &DetectionConfig) -> Result<DetectionReport> {
    cfg.validate()?;
    if g.n() == 0 {
        return Err(Error::ZeroNodes);
    }
    let op = ModularityOperator::new(g, cfg.measure)?;
    let n = g.n();
    let max_k = cfg.max_k.min(n.saturating_sub(1)).max(1);

    // one extra eigenvalue so every candidate k has a ratio
    let mut m = (max_k + 1).min(n);
    if let KSelection::Explicit(k) = cfg.k {
        if k > n {
            return Err(Error::InvalidConfig(format!(
                "explicit k = {k} exceeds the {n} nodes"
            )));
        }
        m = m.max(k);
    }
    let spectrum = dominant_eigenpairs(&op, m, cfg.tol, cfg.seed)?;

    let (ratios, k) = if m >= 2 {
        let ratios = spectrum_ratios(&spectrum.lambdas, max_k, cfg.tol)?;
        let k = select_k(&ratios, cfg);
        (ratios, k)
    } else {
        (Vec::new(), 1)
    };
    if k == 0 || k > spectrum.converged {
        return Err(Error::InsufficientSpectrum);
    }

    let measures = cfg.measure.measures(g);
    let rows = embed_nodes(&spectrum, k, &measures, cfg.scale_rows)?;
    let groups = match cfg.clusters {
        ClustersMode::KPlusOne => k + 1,
        ClustersMode::K => k,
    }
    .min(n);
    let (partition, wcss) = cluster_rows_with_objective(&rows, groups, cfg.seed, cfg.restarts)?;
    let clusters = classify_clusters(g, &partition, cfg.measure, cfg.clusters)?;

    Ok(DetectionReport {
        n,
        num_edges: g.num_edges(),
        measure: cfg.measure,
        seed: cfg.seed,
        k_selected: k,
        clusters_mode: cfg.clusters,
        eigenvalues: spectrum.lambdas,
        ratios,
        clusters,
        wcss,
    })
}

/// Adjusted Rand index between two labelings of the same nodes. Degenerate
/// pairs where the correction term equals the maximum (both partitions
/// trivial) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::ZeroNodes);
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![0u64; ka * kb];
    let mut rows = vec![0u64; ka];
    let mut cols = vec![0u64; kb];
    for (&x, &y) in a.iter().zip(b) {
        table[x * kb + y] += 1;
        rows[x] += 1;
        cols[y] += 1;
    }
    let choose2 = |c: u64| (c * c.saturating_sub(1)) as f64 / 2.0;
    let sum_ij: f64 = table.iter().map(|&c| choose2(c)).sum();
    let sum_a: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sum_b: f64 = cols.iter().map(|&c| choose2(c)).sum();
    let total = choose2(n as u64);
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / (max_index - expected))
}
