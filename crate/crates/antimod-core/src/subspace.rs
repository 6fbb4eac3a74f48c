//! Frobenius matrix angles and projections onto the spaces
//! H(X) = span{x_i x_i^T} and K(X) = {X S X^T}, the module score σ(𝒞),
//! and evaluators for the eigenvalue- and eigenspace-approximation bounds
//! that certify how well a partition's measure vectors align with the
//! dominant eigenspace of the modularity matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet, Partition};
use crate::modularity::{measure_vector, normalized_modularity, MeasurePolicy, ModularityOperator};
use crate::spectral::{SpectralSummary, SymmetricOperator, DEFAULT_DENSE_THRESHOLD};

/// An n×k matrix with orthonormal columns (measure vectors of a partition,
/// or a block of eigenvectors).
#[derive(Debug, Clone)]
pub struct OrthonormalFrame {
    cols: DMatrix<f64>,
}

impl OrthonormalFrame {
    /// Validates orthonormality (‖X^T X − I‖_F ≤ 1e-8) and width
    /// 1 ≤ k ≤ n−1.
    pub fn new(cols: DMatrix<f64>) -> Result<OrthonormalFrame> {
        let (n, k) = (cols.nrows(), cols.ncols());
        if k == 0 || k >= n {
            return Err(Error::BadFrameWidth { k, n });
        }
        let gram = cols.transpose() * &cols;
        let deviation = (gram - DMatrix::identity(k, k)).norm();
        if deviation > 1e-8 {
            return Err(Error::FrameNotOrthonormal { deviation });
        }
        Ok(OrthonormalFrame { cols })
    }

    /// Frame of measure vectors [χ_1, …, χ_k] for the parts of a
    /// partition, in the given part order. Disjoint supports make the
    /// columns orthonormal by construction.
    pub fn from_measure_vectors(
        g: &Graph,
        parts: &[NodeSet],
        p: MeasurePolicy,
    ) -> Result<OrthonormalFrame> {
        let n = g.n();
        let mut cols = DMatrix::zeros(n, parts.len());
        for (j, c) in parts.iter().enumerate() {
            let chi = measure_vector(c, p, g)?;
            for i in 0..n {
                cols[(i, j)] = chi[i];
            }
        }
        OrthonormalFrame::new(cols)
    }

    pub fn n(&self) -> usize {
        self.cols.nrows()
    }

    pub fn k(&self) -> usize {
        self.cols.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.cols
    }
}

/// Outcome of projecting an operator onto H(X) or K(X).
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// H-projection coefficients τ_i = x_i^T A x_i (H only).
    pub taus: Option<Vec<f64>>,
    /// K-projection coupling S = X^T A X (K only).
    pub coupling: Option<DMatrix<f64>>,
    /// cos(A, S) = ‖P‖_F/‖A‖_F ∈ [0, 1].
    pub cosine: f64,
    /// sin(A, S) = ‖A − P‖_F/‖A‖_F ∈ [0, 1]; cos² + sin² = 1.
    pub sine: f64,
    /// ‖P‖_F = cosine·‖A‖_F.
    pub projection_norm: f64,
}

/// Frobenius inner product ⟨A, B⟩ = trace(A^T B).
pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.dot(b))
}

/// Exact ‖A‖_F of an operator: provided by the operator when it can, by
/// dense materialization at dense-path sizes otherwise.
fn operator_fro_norm(op: &dyn SymmetricOperator) -> Result<f64> {
    if let Some(f) = op.frobenius_norm() {
        return Ok(f);
    }
    if op.dim() <= DEFAULT_DENSE_THRESHOLD {
        return Ok(op.materialize().norm());
    }
    Err(Error::InsufficientSpectrum)
}

/// Computes a stable sine for the residual A − P, preferring the direct
/// residual norm when the cosine is close to 1 and a dense materialization
/// is affordable; otherwise √(1 − cos²).
fn stable_sine(
    op: &dyn SymmetricOperator,
    projection: impl FnOnce() -> DMatrix<f64>,
    cosine: f64,
    a_norm: f64,
) -> f64 {
    if cosine > 0.999 && op.dim() <= DEFAULT_DENSE_THRESHOLD {
        let residual = op.materialize() - projection();
        (residual.norm() / a_norm).min(1.0)
    } else {
        (1.0 - cosine * cosine).max(0.0).sqrt()
    }
}

/// Projection of a symmetric operator onto H(X) = span{x_i x_i^T}:
/// P = Σ_i τ_i x_i x_i^T with τ_i = x_i^T A x_i.
#[allow(non_snake_case)]
pub fn project_H(op: &dyn SymmetricOperator, x: &OrthonormalFrame) -> Result<ProjectionResult> {
    if x.n() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: x.n(),
        });
    }
    let a_norm = operator_fro_norm(op)?;
    if a_norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let k = x.k();
    let mut taus = Vec::with_capacity(k);
    for j in 0..k {
        let xj: Vec<f64> = x.columns().column(j).iter().copied().collect();
        let axj = op.apply(&xj);
        taus.push(xj.iter().zip(&axj).map(|(a, b)| a * b).sum());
    }
    let projection_norm = taus.iter().map(|t| t * t).sum::<f64>().sqrt();
    let cosine = (projection_norm / a_norm).min(1.0);
    let sine = stable_sine(
        op,
        || {
            let mut p = DMatrix::zeros(x.n(), x.n());
            for (j, &t) in taus.iter().enumerate() {
                let xj = x.columns().column(j);
                p += t * &xj * xj.transpose();
            }
            p
        },
        cosine,
        a_norm,
    );
    Ok(ProjectionResult {
        taus: Some(taus),
        coupling: None,
        cosine,
        sine,
        projection_norm,
    })
}

/// Projection of a symmetric operator onto K(X) = {X S X^T}:
/// P = X X^T A X X^T with coupling S = X^T A X. H(X) ⊆ K(X), so
/// cos_K ≥ cos_H.
#[allow(non_snake_case)]
pub fn project_K(op: &dyn SymmetricOperator, x: &OrthonormalFrame) -> Result<ProjectionResult> {
    if x.n() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: x.n(),
        });
    }
    let a_norm = operator_fro_norm(op)?;
    if a_norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (n, k) = (x.n(), x.k());
    let mut ax = DMatrix::zeros(n, k);
    for j in 0..k {
        let xj: Vec<f64> = x.columns().column(j).iter().copied().collect();
        let axj = op.apply(&xj);
        for i in 0..n {
            ax[(i, j)] = axj[i];
        }
    }
    let s = x.columns().transpose() * ax;
    let s = (&s + s.transpose()) * 0.5;
    let projection_norm = s.norm();
    let cosine = (projection_norm / a_norm).min(1.0);
    let sine = stable_sine(
        op,
        || x.columns() * &s * x.columns().transpose(),
        cosine,
        a_norm,
    );
    Ok(ProjectionResult {
        taus: None,
        coupling: Some(s),
        cosine,
        sine,
        projection_norm,
    })
}

/// Module score σ(𝒞) = Σ_i q(C_i)², the squared Frobenius norm of the
/// projection of M onto H(X) for the measure-vector frame X.
pub fn sigma_score(g: &Graph, partition: &Partition, p: MeasurePolicy) -> Result<f64> {
    let mut sigma = 0.0;
    for c in partition.parts() {
        let q = normalized_modularity(g, &c, p)?;
        sigma += q * q;
    }
    Ok(sigma)
}

/// One inequality record: the bound holds when lhs ≤ rhs.
#[derive(Debug, Clone)]
pub struct BoundRecord {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundRecord {
    /// slack = rhs − lhs, reported without clamping; nonnegative when the
    /// bound holds.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Evaluated bounds for one (operator, partition, spectrum) instance.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub records: Vec<BoundRecord>,
    /// c = cos(M, H(X)) and s = sin(M, H(X)) for the measure-vector frame.
    pub cosine: f64,
    pub sine: f64,
    /// Normalized modularities q(C_i), parts ordered by nonincreasing
    /// |q(C_i)| — the order they are matched to λ_1, …, λ_k in.
    pub ordered_q: Vec<f64>,
    /// Per-part signed ratios q(C_i)/λ_i in matched order (NaN where
    /// λ_i = 0).
    pub signed_ratios: Vec<f64>,
    /// First matched index whose signed ratio lies in [1−s, 1+s], if any.
    /// When s < 1 some index always satisfies the modulus variant
    /// 1−s ≤ |q(C_i)|/|λ_i| ≤ 1+s; the signed interval additionally needs
    /// sign(q_i) = sign(λ_i), which holds when the partition tracks
    /// genuine structure.
    pub ratio_index: Option<usize>,
    /// Orthogonal aligner Z minimizing ‖U_1 − XZ‖_F (eigenspace bounds
    /// only).
    pub aligner: Option<DMatrix<f64>>,
}

/// Parts of a partition ordered by nonincreasing |q(C_i)|, with their
/// normalized modularities.
fn ordered_parts_with_q(
    g: &Graph,
    partition: &Partition,
    p: MeasurePolicy,
) -> Result<(Vec<NodeSet>, Vec<f64>)> {
    let parts = partition.parts();
    let mut with_q = Vec::with_capacity(parts.len());
    for c in parts {
        let q = normalized_modularity(g, &c, p)?;
        with_q.push((c, q));
    }
    with_q.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap());
    Ok(with_q.into_iter().unzip())
}

fn leading_lambdas(spectrum: &SpectralSummary, k: usize) -> Result<&[f64]> {
    if spectrum.lambdas.len() < k {
        return Err(Error::InsufficientSpectrum);
    }
    Ok(&spectrum.lambdas[..k])
}

/// Finds an index with 1−s ≤ q_i/λ_i ≤ 1+s (signed ratios).
fn ratio_interval_index(ratios: &[f64], s: f64) -> Option<usize> {
    ratios
        .iter()
        .position(|&r| r.is_finite() && r >= 1.0 - s && r <= 1.0 + s)
}

fn signed_ratios(lambdas: &[f64], qs: &[f64]) -> Vec<f64> {
    lambdas
        .iter()
        .zip(qs)
        .map(|(l, q)| if *l == 0.0 { f64::NAN } else { q / l })
        .collect()
}

/// Evaluates the eigenvalue approximation bounds relating the top-k
/// spectrum of M to the normalized modularities of a k-part partition:
///
/// 1. c²·Σ_i λ_i² + Σ_{i≤k}(|λ_i| − |q(C_i)|)²  ≤  Σ_{i≤k} λ_i²
/// 2. Σ_{i≤k}(|λ_i| − |q(C_i)|)²  ≤  s²·Σ_{i≤k} λ_i²
///
/// with c, s the cosine/sine of M against H(X) for the measure-vector
/// frame X, parts ordered by nonincreasing |q(C_i)|. Also reports the
/// signed ratios q(C_i)/λ_i and the first index with
/// 1−s ≤ q(C_i)/λ_i ≤ 1+s, when one exists.
pub fn eigenvalue_bounds(
    op: &ModularityOperator<'_>,
    partition: &Partition,
    spectrum: &SpectralSummary,
) -> Result<BoundReport> {
    let g = op.graph();
    let p = op.policy();
    let (parts, qs) = ordered_parts_with_q(g, partition, p)?;
    let k = parts.len();
    let lambdas = leading_lambdas(spectrum, k)?;

    let frame = OrthonormalFrame::from_measure_vectors(g, &parts, p)?;
    let ph = project_H(op, &frame)?;
    let (c, s) = (ph.cosine, ph.sine);

    let fro = op.frobenius_norm_exact();
    let total_energy = fro * fro;
    let topk_energy: f64 = lambdas.iter().map(|l| l * l).sum();
    let deviation: f64 = lambdas
        .iter()
        .zip(&qs)
        .map(|(l, q)| {
            let d = l.abs() - q.abs();
            d * d
        })
        .sum();

    let records = vec![
        BoundRecord {
            name: "eigenvalue-energy",
            lhs: c * c * total_energy + deviation,
            rhs: topk_energy,
        },
        BoundRecord {
            name: "modularity-deviation",
            lhs: deviation,
            rhs: s * s * topk_energy,
        },
    ];

    let ratios = signed_ratios(lambdas, &qs);
    let ratio_index = ratio_interval_index(&ratios, s);

    Ok(BoundReport {
        records,
        cosine: c,
        sine: s,
        ordered_q: qs,
        signed_ratios: ratios,
        ratio_index,
        aligner: None,
    })
}

/// Evaluates the eigenspace distance bounds between the dominant
/// eigenvector block U_1 (top-k by modulus) and the measure-vector frame
/// X of a k-part partition:
///
/// 1. ‖U_1^T X_⊥‖_F²  ≤  s²‖M‖_F²/λ_k² − Σ_i ‖Mχ_i − q(C_i)χ_i‖₂²/λ_k²
/// 2. min_{Z orthogonal} ‖U_1 − XZ‖_F  ≤  √2·‖M‖_F·s/|λ_k|
///
/// where X_⊥ completes X to an orthonormal basis (the left side of (1) is
/// evaluated as k − ‖X^T U_1‖_F²) and the optimal Z comes from the
/// orthogonal Procrustes problem via the SVD of X^T U_1.
pub fn eigenspace_bounds(
    op: &ModularityOperator<'_>,
    partition: &Partition,
    spectrum: &SpectralSummary,
) -> Result<BoundReport> {
    let g = op.graph();
    let p = op.policy();
    let (parts, qs) = ordered_parts_with_q(g, partition, p)?;
    let k = parts.len();
    let lambdas = leading_lambdas(spectrum, k)?;
    let lambda_k = lambdas[k - 1];
    if lambda_k.abs() <= 1e-8 {
        return Err(Error::ZeroLeadingEigenvalue {
            value: lambda_k.abs(),
        });
    }

    let frame = OrthonormalFrame::from_measure_vectors(g, &parts, p)?;
    let ph = project_H(op, &frame)?;
    let s = ph.sine;

    let fro = op.frobenius_norm_exact();
    let u1 = spectrum.leading_vectors(k);
    let cross = frame.columns().transpose() * &u1; // X^T U_1, k×k

    // ‖U_1^T X_⊥‖_F² = ‖U_1‖_F² − ‖U_1^T X‖_F² because [X, X_⊥] is an
    // orthonormal basis.
    let lhs_subspace = (k as f64 - cross.norm_squared()).max(0.0);

    let mut residual_energy = 0.0;
    for (c, q) in parts.iter().zip(&qs) {
        let chi = measure_vector(c, p, g)?;
        let m_chi = op.apply(&chi);
        residual_energy += chi
            .iter()
            .zip(&m_chi)
            .map(|(x, mx)| {
                let r = mx - q * x;
                r * r
            })
            .sum::<f64>();
    }
    let rhs_subspace = (s * s * fro * fro - residual_energy) / (lambda_k * lambda_k);

    let svd = cross.clone().svd(true, true);
    let aligner = svd.u.as_ref().unwrap() * svd.v_t.as_ref().unwrap();
    let lhs_procrustes = (&u1 - frame.columns() * &aligner).norm();
    let rhs_procrustes = 2.0_f64.sqrt() * fro * s / lambda_k.abs();

    let records = vec![
        BoundRecord {
            name: "eigenspace-alignment",
            lhs: lhs_subspace,
            rhs: rhs_subspace,
        },
        BoundRecord {
            name: "procrustes-distance",
            lhs: lhs_procrustes,
            rhs: rhs_procrustes,
        },
    ];

    let ratios = signed_ratios(lambdas, &qs);
    let ratio_index = ratio_interval_index(&ratios, s);

    Ok(BoundReport {
        records,
        cosine: ph.cosine,
        sine: s,
        ordered_q: qs,
        signed_ratios: ratios,
        ratio_index,
        aligner: Some(aligner),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::{dominant_eigenpairs, full_symmetric_eig, DenseOperator};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn triangle() -> Graph {
        Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn random_symmetric(rng: &mut StdRng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        (&a + a.transpose()) * 0.5
    }

    fn random_frame(rng: &mut StdRng, n: usize, k: usize) -> OrthonormalFrame {
        assert!(k >= 1 && k < n, "frame width must satisfy 1 <= k < n");
        loop {
            let a = DMatrix::from_fn(n, k, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let qr = a.qr();
            let q = qr.q().columns(0, k).into_owned();
            if let Ok(f) = OrthonormalFrame::new(q) {
                return f;
            }
        }
    }

    #[test]
    fn frobenius_inner_examples() {
        let i2 = DMatrix::identity(2, 2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), 2.0);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(frobenius_inner(&swap, &i2).unwrap(), 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(frobenius_inner(&a, &i2).unwrap(), 5.0);
        let bad = DMatrix::zeros(2, 3);
        assert!(frobenius_inner(&a, &bad).is_err());
    }

    #[test]
    fn project_h_on_triangle_pair() {
        let g = triangle();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let frame = OrthonormalFrame::from_measure_vectors(
            &g,
            &[NodeSet::new([0, 1])],
            MeasurePolicy::Unit,
        )
        .unwrap();
        let r = project_H(&op, &frame).unwrap();
        let taus = r.taus.unwrap();
        assert_relative_eq!(taus[0], -1.0 / 3.0, max_relative = 1e-12);
        // ‖M̂‖_F² = 2 for the triangle (eigenvalues 0, −1, −1)
        assert_relative_eq!(r.cosine, (1.0 / 18.0_f64).sqrt(), max_relative = 1e-10);
        assert_abs_diff_eq!(r.cosine * r.cosine + r.sine * r.sine, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn scaled_ones_direction_is_annihilated() {
        let g = triangle();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let n = 3.0_f64;
        let cols = DMatrix::from_fn(3, 1, |_, _| 1.0 / n.sqrt());
        let frame = OrthonormalFrame::new(cols).unwrap();
        let r = project_H(&op, &frame).unwrap();
        assert_abs_diff_eq!(r.taus.unwrap()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.cosine, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_one_matrix_lies_in_its_own_h_space() {
        let x = DVector::from_column_slice(&[0.5, -0.5, 0.5, 0.5]);
        let a = &x * x.transpose();
        let op = DenseOperator::new(a);
        let frame = OrthonormalFrame::new(DMatrix::from_column_slice(4, 1, x.as_slice())).unwrap();
        let r = project_H(&op, &frame).unwrap();
        assert_relative_eq!(r.cosine, 1.0, max_relative = 1e-12);
        assert_abs_diff_eq!(r.sine, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn k_projection_of_top_eigenvectors_captures_their_energy() {
        let mut rng = StdRng::seed_from_u64(21);
        let a = random_symmetric(&mut rng, 12);
        let eig = full_symmetric_eig(&a).unwrap();
        let k = 3;
        let frame = OrthonormalFrame::new(eig.leading_vectors(k)).unwrap();
        let op = DenseOperator::new(a);
        let r = project_K(&op, &frame).unwrap();
        let expected: f64 = eig.lambdas[..k].iter().map(|l| l * l).sum();
        assert_relative_eq!(
            r.projection_norm * r.projection_norm,
            expected,
            max_relative = 1e-9
        );
    }

    #[test]
    fn k_projection_width_one_matches_h() {
        let mut rng = StdRng::seed_from_u64(22);
        let a = random_symmetric(&mut rng, 9);
        let op = DenseOperator::new(a);
        let frame = random_frame(&mut rng, 9, 1);
        let h = project_H(&op, &frame).unwrap();
        let k = project_K(&op, &frame).unwrap();
        assert_relative_eq!(h.cosine, k.cosine, max_relative = 1e-10);
        assert_relative_eq!(
            h.taus.unwrap()[0],
            k.coupling.unwrap()[(0, 0)],
            max_relative = 1e-10
        );
    }

    #[test]
    fn identity_projects_to_sqrt_k_over_n() {
        let mut rng = StdRng::seed_from_u64(23);
        let n = 10;
        let op = DenseOperator::new(DMatrix::identity(n, n));
        for k in [1, 3, 7] {
            let frame = random_frame(&mut rng, n, k);
            let r = project_K(&op, &frame).unwrap();
            assert_relative_eq!(
                r.cosine,
                (k as f64 / n as f64).sqrt(),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn h_cosine_never_exceeds_k_cosine() {
        let mut rng = StdRng::seed_from_u64(24);
        for _ in 0..30 {
            let n = rng.gen_range(4..=20);
            let k = rng.gen_range(1..n);
            let a = random_symmetric(&mut rng, n);
            let op = DenseOperator::new(a);
            let frame = random_frame(&mut rng, n, k);
            let h = project_H(&op, &frame).unwrap();
            let kk = project_K(&op, &frame).unwrap();
            assert!(kk.cosine >= h.cosine - 1e-12);
        }
    }

    #[test]
    fn k_projection_is_blockwise_rank_one() {
        let mut rng = StdRng::seed_from_u64(25);
        let n = 12;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < 0.5 {
                    edges.push((i, j, 1.0 + rng.gen::<f64>()));
                }
            }
        }
        let g = Graph::build(n, &edges).unwrap();
        let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let partition = Partition::from_labels(&labels);
        let parts = partition.parts();
        let frame =
            OrthonormalFrame::from_measure_vectors(&g, &parts, MeasurePolicy::Degree).unwrap();
        let op = ModularityOperator::new(&g, MeasurePolicy::Degree).unwrap();
        let r = project_K(&op, &frame).unwrap();
        let s = r.coupling.unwrap();
        let p = frame.columns() * &s * frame.columns().transpose();
        // Block (a, b) of the projection equals s_ab · χ_a χ_b^T restricted
        // to the supports, because the frame columns have disjoint support.
        for u in 0..n {
            for v in 0..n {
                let (a, b) = (labels[u], labels[v]);
                let expected = s[(a, b)] * frame.columns()[(u, a)] * frame.columns()[(v, b)];
                assert_abs_diff_eq!(p[(u, v)], expected, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sigma_score_examples() {
        let g = triangle();
        let p = Partition::from_parts(&[NodeSet::new([0, 1])], 3).unwrap();
        let s = sigma_score(&g, &p, MeasurePolicy::Unit).unwrap();
        assert_relative_eq!(s, 1.0 / 9.0, max_relative = 1e-12);

        let p = Partition::from_parts(&[NodeSet::full(3)], 3).unwrap();
        assert_abs_diff_eq!(
            sigma_score(&g, &p, MeasurePolicy::Degree).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        let g = Graph::build(4, &[(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]).unwrap();
        let p = Partition::from_parts(&[NodeSet::new([0, 1]), NodeSet::new([2, 3])], 4).unwrap();
        assert_relative_eq!(
            sigma_score(&g, &p, MeasurePolicy::Degree).unwrap(),
            0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sigma_equals_h_projection_energy() {
        let mut rng = StdRng::seed_from_u64(26);
        for _ in 0..10 {
            let n = rng.gen_range(6..=24);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < 0.4 {
                        edges.push((i, j, 0.5 + rng.gen::<f64>()));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = Graph::build(n, &edges).unwrap();
            let k = rng.gen_range(1..=3.min(n - 1));
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let partition = Partition::from_labels(&labels);
            if partition.parts().iter().any(|c| c.is_empty()) {
                continue;
            }
            let policy = MeasurePolicy::Offset(1.0);
            let op = ModularityOperator::new(&g, policy).unwrap();
            let frame =
                OrthonormalFrame::from_measure_vectors(&g, &partition.parts(), policy).unwrap();
            let ph = project_H(&op, &frame).unwrap();
            let sigma = sigma_score(&g, &partition, policy).unwrap();
            assert_relative_eq!(
                sigma,
                ph.projection_norm * ph.projection_norm,
                max_relative = 1e-10,
                epsilon = 1e-12
            );
        }
    }

    /// Average adjacency of a two-block model as a weighted graph: the
    /// diagonal entries become self-loops, so the unit-policy modularity
    /// operator reproduces the exact average modularity matrix.
    fn two_block_average_graph() -> Graph {
        let (m, p, q) = (4usize, 0.8, 0.2);
        let n = 2 * m;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                let same = (u < m) == (v < m);
                let w = if same { p } else { q };
                edges.push((u, v, w));
            }
        }
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn exact_block_average_is_perfect_for_k_not_h() {
        let g = two_block_average_graph();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let parts = [NodeSet::new(0..4), NodeSet::new(4..8)];
        let frame =
            OrthonormalFrame::from_measure_vectors(&g, &parts, MeasurePolicy::Unit).unwrap();
        let k = project_K(&op, &frame).unwrap();
        assert!(k.cosine >= 1.0 - 1e-9);
        // H captures only σ(𝒞) = 2·q², here exactly half the energy.
        let h = project_H(&op, &frame).unwrap();
        assert_relative_eq!(h.cosine, 0.5_f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn eigenvalue_bounds_hold_on_exact_block_average() {
        let g = two_block_average_graph();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let spectrum = dominant_eigenpairs(&op, 8, 1e-10, 3).unwrap();
        assert_relative_eq!(spectrum.lambdas[0], 2.4, max_relative = 1e-9);
        let partition =
            Partition::from_parts(&[NodeSet::new(0..4), NodeSet::new(4..8)], 8).unwrap();
        let report = eigenvalue_bounds(&op, &partition, &spectrum).unwrap();
        for rec in &report.records {
            assert!(rec.slack() >= -1e-9, "{} violated: {}", rec.name, rec.slack());
        }
        assert!(report.ratio_index.is_some());
    }

    #[test]
    fn trivial_partition_gives_degenerate_but_valid_bounds() {
        let g = triangle();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let spectrum = dominant_eigenpairs(&op, 3, 1e-10, 5).unwrap();
        let partition = Partition::from_parts(&[NodeSet::full(3)], 3).unwrap();
        let report = eigenvalue_bounds(&op, &partition, &spectrum).unwrap();
        // q(V) = 0 forces c = 0, reducing (1) to λ_1² ≥ λ_1².
        assert_abs_diff_eq!(report.cosine, 0.0, epsilon = 1e-12);
        for rec in &report.records {
            assert!(rec.slack() >= -1e-9);
        }
    }

    #[test]
    fn random_instances_satisfy_both_bound_sets() {
        let mut rng = StdRng::seed_from_u64(27);
        let mut evaluated = 0;
        for _ in 0..25 {
            let n = rng.gen_range(8..=20);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < 0.5 {
                        edges.push((i, j, 0.5 + rng.gen::<f64>()));
                    }
                }
            }
            let g = Graph::build(n, &edges).unwrap();
            let k = rng.gen_range(1..=2);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let partition = Partition::from_labels(&labels);
            if partition.parts().iter().any(|c| c.is_empty()) {
                continue;
            }
            let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
            let spectrum = dominant_eigenpairs(&op, n, 1e-10, 11).unwrap();
            let ev = eigenvalue_bounds(&op, &partition, &spectrum).unwrap();
            for rec in &ev.records {
                assert!(rec.slack() >= -1e-9, "{}: {}", rec.name, rec.slack());
            }
            if ev.sine < 1.0 {
                // The modulus variant of the ratio interval is what the
                // deviation bound forces for arbitrary partitions; the
                // signed flag needs sign agreement on top of it.
                let s = ev.sine;
                let modulus_hit = ev
                    .ordered_q
                    .iter()
                    .zip(&spectrum.lambdas)
                    .any(|(q, l)| {
                        *l != 0.0 && {
                            let r = q.abs() / l.abs();
                            (1.0 - s..=1.0 + s).contains(&r)
                        }
                    });
                assert!(modulus_hit);
            }
            match eigenspace_bounds(&op, &partition, &spectrum) {
                Ok(es) => {
                    evaluated += 1;
                    for rec in &es.records {
                        assert!(rec.slack() >= -1e-9, "{}: {}", rec.name, rec.slack());
                    }
                    assert!(es.aligner.is_some());
                }
                Err(Error::ZeroLeadingEigenvalue { .. }) => {}
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
        assert!(evaluated >= 15);
    }

    #[test]
    fn eigenspace_bounds_reject_zero_leading_eigenvalue() {
        // The exact two-block average matrix has a single nonzero
        // eigenvalue, so a two-part partition hits λ_2 = 0.
        let g = two_block_average_graph();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let spectrum = dominant_eigenpairs(&op, 8, 1e-10, 3).unwrap();
        let partition =
            Partition::from_parts(&[NodeSet::new(0..4), NodeSet::new(4..8)], 8).unwrap();
        assert!(matches!(
            eigenspace_bounds(&op, &partition, &spectrum),
            Err(Error::ZeroLeadingEigenvalue { .. })
        ));
    }

    #[test]
    fn procrustes_distance_is_zero_for_perfect_frame() {
        let mut rng = StdRng::seed_from_u64(28);
        let n = 14;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < 0.6 {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let g = Graph::build(n, &edges).unwrap();
        let op = ModularityOperator::new(&g, MeasurePolicy::Unit).unwrap();
        let spectrum = dominant_eigenpairs(&op, n, 1e-10, 9).unwrap();
        let k = 3;
        let u1 = spectrum.leading_vectors(k);
        // Rotate U_1 by an arbitrary orthogonal matrix; Procrustes must
        // recover the rotation exactly.
        let rot = {
            let a = DMatrix::from_fn(k, k, |_, _| rng.gen::<f64>() - 0.5);
            let qr = a.qr();
            qr.q().columns(0, k).into_owned()
        };
        let x = &u1 * &rot;
        let cross = x.transpose() * &u1;
        let svd = cross.svd(true, true);
        let z = svd.u.as_ref().unwrap() * svd.v_t.as_ref().unwrap();
        let dist = (&u1 - &x * &z).norm();
        assert_abs_diff_eq!(dist, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn maxcos_identity_for_top_eigenvector_frames() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..20 {
            let n = rng.gen_range(5..=30);
            let a = random_symmetric(&mut rng, n);
            let eig = full_symmetric_eig(&a).unwrap();
            let mut k = rng.gen_range(1..n);
            // need a modulus gap for U_k to be well defined
            while k < n && (eig.lambdas[k - 1].abs() - eig.lambdas[k.min(n - 1)].abs()).abs() < 1e-6
            {
                k += 1;
            }
            if k >= n {
                continue;
            }
            let frame = OrthonormalFrame::new(eig.leading_vectors(k)).unwrap();
            let op = DenseOperator::new(a);
            let r = project_H(&op, &frame).unwrap();
            let total: f64 = eig.lambdas.iter().map(|l| l * l).sum();
            let topk: f64 = eig.lambdas[..k].iter().map(|l| l * l).sum();
            assert_abs_diff_eq!(r.cosine * r.cosine, topk / total, epsilon = 1e-9);

            // no random frame beats it
            for _ in 0..5 {
                let competitor = random_frame(&mut rng, n, k);
                let rc = project_H(&op, &competitor).unwrap();
                assert!(rc.cosine * rc.cosine <= topk / total + 1e-9);
            }
        }
    }

    #[test]
    fn frame_validation_errors() {
        let bad = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            OrthonormalFrame::new(bad),
            Err(Error::FrameNotOrthonormal { .. })
        ));
        let too_wide = DMatrix::identity(3, 3);
        assert!(matches!(
            OrthonormalFrame::new(too_wide),
            Err(Error::BadFrameWidth { .. })
        ));
    }
}
