//! Graph data model: sparse symmetric weighted adjacency, node sets,
//! partitions, degrees, volumes and characteristic vectors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Immutable undirected weighted graph in compressed sparse row layout.
///
/// The adjacency is stored symmetrically: an undirected edge {i, j} with
/// i != j appears in both row i and row j. A self-loop (i, i, w) stores w
/// on the diagonal and contributes w once to the degree d_i, so the degree
/// vector is literally d = A·1 and vol(V) = Σ_i d_i counts off-diagonal
/// weight twice and loop weight once.
///
/// Construction validates indices and weights; after that the structure is
/// immutable, so shared references can be used freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    volume: f64,
    num_edges: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate (i, j) entries — in
    /// either orientation — are accumulated by summation. Edge order does
    /// not affect the result.
    pub fn build(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        let mut undirected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, w) in edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if !(w > 0.0) {
                return Err(Error::NonpositiveWeight { i, j, w });
            }
            let key = (i.min(j), i.max(j));
            *undirected.entry(key).or_insert(0.0) += w;
        }

        let mut counts = vec![0usize; n];
        for (&(i, j), _) in &undirected {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        let mut cursor = row_ptr[..n].to_vec();
        for (&(i, j), &w) in &undirected {
            col_idx[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
            if i != j {
                col_idx[cursor[j]] = i;
                weights[cursor[j]] = w;
                cursor[j] += 1;
            }
        }
        // BTreeMap iteration emits (i, j) keys in lexicographic order, so
        // each row's column indices come out already sorted.

        let mut degrees = vec![0.0f64; n];
        for i in 0..n {
            degrees[i] = weights[row_ptr[i]..row_ptr[i + 1]].iter().sum();
        }
        let volume = degrees.iter().sum();

        Ok(Graph {
            n,
            row_ptr,
            col_idx,
            weights,
            degrees,
            volume,
            num_edges: undirected.len(),
        })
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct undirected edges (self-loops count once).
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Degree d_i = Σ_j w_ij.
    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    /// The full degree vector d = A·1.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// vol(V) = Σ_i d_i.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Neighbors of node i as (j, w_ij) pairs, ascending in j.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Weight of the (i, j) pair; 0 when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.weights[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// Sparse matrix-vector product out = A·x in O(nnz).
    ///
    /// Each output entry is a single left-to-right dot product, so results
    /// are bitwise deterministic regardless of how callers parallelize over
    /// rows.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = 0.0;
            for t in lo..hi {
                acc += self.weights[t] * x[self.col_idx[t]];
            }
            out[i] = acc;
        }
    }

    /// Convenience allocating wrapper around [`Graph::matvec_into`].
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    /// Iterates the undirected edge set once: (i, j, w) with i <= j.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| i <= j)
                .map(move |(j, w)| (i, j, w))
        })
    }
}

/// Builds a graph from an edge list; see [`Graph::build`].
pub fn build_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
    Graph::build(n, edges)
}

/// A subset of the node indices [0, n), kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    members: Vec<usize>,
}

impl NodeSet {
    /// Creates a node set from arbitrary (possibly unsorted, duplicated)
    /// indices.
    pub fn new(members: impl IntoIterator<Item = usize>) -> NodeSet {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        NodeSet { members }
    }

    /// The empty set.
    pub fn empty() -> NodeSet {
        NodeSet { members: Vec::new() }
    }

    /// The full vertex set {0, …, n-1}.
    pub fn full(n: usize) -> NodeSet {
        NodeSet { members: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Sorted member indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Errors unless every member lies in [0, n).
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&max) if max >= n => Err(Error::IndexOutOfRange { index: max, n }),
            _ => Ok(()),
        }
    }

    /// Complement with respect to the vertex set {0, …, n-1}.
    pub fn complement(&self, n: usize) -> Result<NodeSet> {
        self.validate(n)?;
        let mut out = Vec::with_capacity(n - self.members.len());
        let mut it = self.members.iter().peekable();
        for v in 0..n {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        Ok(NodeSet { members: out })
    }

    /// Dense 0/1 indicator vector of length n.
    pub fn characteristic_vector(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for &i in &self.members {
            if i < n {
                v[i] = 1.0;
            }
        }
        v
    }
}

/// Dense 0/1 indicator vector of a node set; entry 1 on members.
pub fn characteristic_vector(c: &NodeSet, n: usize) -> Vec<f64> {
    c.characteristic_vector(n)
}

/// vol(C) = Σ_{i∈C} d_i.
pub fn volume(g: &Graph, c: &NodeSet) -> Result<f64> {
    c.validate(g.n())?;
    Ok(c.iter().map(|i| g.degree(i)).sum())
}

/// A labeling of nodes into k pairwise disjoint sets; nodes may also be
/// left unassigned, so the union of the sets need not cover V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<Option<usize>>,
    k: usize,
}

impl Partition {
    /// Builds a partition from per-node optional labels; `k` must exceed
    /// every present label.
    pub fn new(labels: Vec<Option<usize>>, k: usize) -> Result<Partition> {
        for (i, lab) in labels.iter().enumerate() {
            if let Some(l) = lab {
                if *l >= k {
                    return Err(Error::InvalidConfig(format!(
                        "node {i} has label {l} but the partition declares k = {k}"
                    )));
                }
            }
        }
        Ok(Partition { labels, k })
    }

    /// Builds a covering partition from plain labels; k = max label + 1.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        Partition {
            labels: labels.iter().map(|&l| Some(l)).collect(),
            k,
        }
    }

    /// Builds a partition from explicit disjoint node sets.
    pub fn from_parts(parts: &[NodeSet], n: usize) -> Result<Partition> {
        let mut labels = vec![None; n];
        for (j, part) in parts.iter().enumerate() {
            part.validate(n)?;
            for i in part.iter() {
                if labels[i].is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "node {i} appears in more than one part"
                    )));
                }
                labels[i] = Some(j);
            }
        }
        Ok(Partition { labels, k: parts.len() })
    }

    /// Number of sets.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of nodes the labeling covers (assigned or not).
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> Option<usize> {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    /// True when every node carries a label.
    pub fn covers_all(&self) -> bool {
        self.labels.iter().all(|l| l.is_some())
    }

    /// The j-th set.
    pub fn part(&self, j: usize) -> NodeSet {
        NodeSet::new(
            self.labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == Some(j))
                .map(|(i, _)| i),
        )
    }

    /// All k sets in label order.
    pub fn parts(&self) -> Vec<NodeSet> {
        let mut parts = vec![Vec::new(); self.k];
        for (i, lab) in self.labels.iter().enumerate() {
            if let Some(l) = lab {
                parts[*l].push(i);
            }
        }
        parts
            .into_iter()
            .map(|members| NodeSet { members })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> Graph {
        Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn k22() -> Graph {
        Graph::build(4, &[(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]).unwrap()
    }

    #[test]
    fn triangle_degrees_and_volume() {
        let g = triangle();
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.volume(), 6.0);
        assert_eq!(g.num_edges(), 3);
    }

    #[test]
    fn empty_edge_list_gives_zero_degrees() {
        let g = Graph::build(4, &[]).unwrap();
        assert_eq!(g.degrees(), &[0.0; 4]);
        assert_eq!(g.volume(), 0.0);
    }

    #[test]
    fn complete_bipartite_k22() {
        let g = k22();
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(g.volume(), 8.0);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(matches!(Graph::build(0, &[]), Err(Error::ZeroNodes)));
    }

    #[test]
    fn bad_index_rejected() {
        let err = Graph::build(2, &[(0, 5, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 5, n: 2 }));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        assert!(Graph::build(2, &[(0, 1, 0.0)]).is_err());
        assert!(Graph::build(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn duplicates_accumulate_across_orientations() {
        let g = Graph::build(2, &[(0, 1, 2.5), (1, 0, 2.5)]).unwrap();
        assert_eq!(g.weight(0, 1), 5.0);
        assert_eq!(g.weight(1, 0), 5.0);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn self_loop_counts_once_in_degree() {
        let g = Graph::build(2, &[(0, 0, 3.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.weight(0, 0), 3.0);
        assert_eq!(g.degree(0), 4.0);
        assert_eq!(g.degree(1), 1.0);
        // vol = 2 * offdiagonal + loops
        assert_eq!(g.volume(), 2.0 * 1.0 + 3.0);
    }

    #[test]
    fn matvec_matches_adjacency() {
        let g = triangle();
        let y = g.matvec(&[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![5.0, 4.0, 3.0]);
    }

    #[test]
    fn build_is_order_insensitive() {
        let edges = [(0, 1, 1.0), (1, 2, 0.5), (0, 2, 2.0), (2, 3, 1.5)];
        let mut reversed = edges;
        reversed.reverse();
        let a = Graph::build(4, &edges).unwrap();
        let b = Graph::build(4, &reversed).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn volume_splits_over_complement() {
        let g = k22();
        let c = NodeSet::new([0, 1]);
        let cc = c.complement(4).unwrap();
        let v = volume(&g, &c).unwrap();
        let vc = volume(&g, &cc).unwrap();
        assert_relative_eq!(v + vc, g.volume());
        assert_eq!(v, 4.0);
    }

    #[test]
    fn characteristic_vector_basics() {
        assert_eq!(
            characteristic_vector(&NodeSet::new([0, 1]), 3),
            vec![1.0, 1.0, 0.0]
        );
        assert_eq!(characteristic_vector(&NodeSet::empty(), 2), vec![0.0, 0.0]);
        assert_eq!(characteristic_vector(&NodeSet::full(2), 2), vec![1.0, 1.0]);
    }

    #[test]
    fn complement_is_involutive() {
        let c = NodeSet::new([1, 3, 4]);
        let back = c.complement(6).unwrap().complement(6).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.len() + c.complement(6).unwrap().len(), 6);
    }

    #[test]
    fn partition_round_trips_parts() {
        let parts = [NodeSet::new([0, 2]), NodeSet::new([1])];
        let p = Partition::from_parts(&parts, 4).unwrap();
        assert_eq!(p.k(), 2);
        assert!(!p.covers_all());
        assert_eq!(p.part(0), parts[0]);
        assert_eq!(p.part(1), parts[1]);
        assert_eq!(p.label(3), None);
    }

    #[test]
    fn partition_rejects_overlap() {
        let parts = [NodeSet::new([0, 1]), NodeSet::new([1, 2])];
        assert!(Partition::from_parts(&parts, 3).is_err());
    }

    #[test]
    fn weight_lookup_absent_pair_is_zero() {
        let g = triangle();
        assert_eq!(g.weight(0, 0), 0.0);
        let h = Graph::build(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(h.weight(1, 2), 0.0);
    }
}
