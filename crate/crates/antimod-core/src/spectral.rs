//! Eigenvalue machinery: dominant-in-modulus eigenpairs of symmetric
//! operators (dense decomposition at small sizes, thick-restart Lanczos
//! above), full symmetric eigendecomposition, singular values, and
//! low-rank truncation.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Below this dimension eigenproblems are solved by dense decomposition;
/// above it the matrix-free Krylov path is used.
pub const DEFAULT_DENSE_THRESHOLD: usize = 512;

/// Default residual tolerance for the iterative eigensolver.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Restart cap factor: the solver gives up after 50·m restarts.
const MAX_RESTARTS_PER_PAIR: usize = 50;

/// A real symmetric linear operator given by its action on vectors.
pub trait SymmetricOperator: Sync {
    /// Operator dimension n.
    fn dim(&self) -> usize;

    /// out = A·x. Implementations must be deterministic for fixed input
    /// (fixed reduction order) so that solver output does not depend on
    /// thread count.
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    /// Exact Frobenius norm when the operator can provide it cheaply.
    fn frobenius_norm(&self) -> Option<f64> {
        None
    }

    /// Dense materialization; the default applies the operator to the
    /// standard basis and is only intended for dense-path sizes.
    fn materialize(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_into(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

/// A dense symmetric matrix viewed as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> DenseOperator {
        DenseOperator { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl SymmetricOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.matrix[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    }

    fn frobenius_norm(&self) -> Option<f64> {
        Some(self.matrix.norm())
    }

    fn materialize(&self) -> DMatrix<f64> {
        self.matrix.clone()
    }
}

/// Eigenvalues sorted by nonincreasing modulus with paired orthonormal
/// eigenvectors and residual diagnostics.
///
/// Ordering: |λ_1| ≥ |λ_2| ≥ …; ties by descending signed value, then by
/// ascending original index. Each eigenvector is normalized so its entry
/// of largest absolute value (lowest index on ties) is positive.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub lambdas: Vec<f64>,
    /// n×m matrix; column i pairs with lambdas[i].
    pub vectors: DMatrix<f64>,
    /// Per-pair residual ‖A u − λ u‖₂.
    pub residuals: Vec<f64>,
    /// Number of pairs meeting the residual tolerance.
    pub converged: usize,
}

impl SpectralSummary {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// The leading k eigenvector columns as an n×k matrix.
    pub fn leading_vectors(&self, k: usize) -> DMatrix<f64> {
        self.vectors.columns(0, k).into_owned()
    }
}

/// Sort keys implementing the ordering contract: nonincreasing |λ|, ties
/// by descending signed value, then ascending original index.
fn modulus_order(lambdas: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..lambdas.len()).collect();
    idx.sort_by(|&a, &b| {
        let (la, lb) = (lambdas[a], lambdas[b]);
        lb.abs()
            .partial_cmp(&la.abs())
            .unwrap()
            .then(lb.partial_cmp(&la).unwrap())
            .then(a.cmp(&b))
    });
    idx
}

/// Flips each column so its largest-magnitude entry (lowest index on
/// ties) is positive.
fn canonicalize_signs(vectors: &mut DMatrix<f64>) {
    for c in 0..vectors.ncols() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..vectors.nrows() {
            let a = vectors[(r, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if vectors[(best, c)] < 0.0 {
            for r in 0..vectors.nrows() {
                vectors[(r, c)] = -vectors[(r, c)];
            }
        }
    }
}

fn symmetry_deviation(a: &DMatrix<f64>) -> (f64, f64) {
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)]).abs());
        }
        for j in 0..a.ncols() {
            scale = scale.max(a[(i, j)].abs());
        }
    }
    (dev, scale)
}

/// Full eigendecomposition of a dense symmetric matrix, with the
/// crate-wide ordering and sign conventions.
pub fn full_symmetric_eig(a: &DMatrix<f64>) -> Result<SpectralSummary> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let (dev, scale) = symmetry_deviation(a);
    if dev > 1e-12 * scale.max(1e-300) {
        return Err(Error::NotSymmetric);
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = modulus_order(&raw);
    let lambdas: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = DMatrix::zeros(a.nrows(), order.len());
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    canonicalize_signs(&mut vectors);
    let av = a * &vectors;
    let residuals: Vec<f64> = (0..lambdas.len())
        .map(|i| (av.column(i) - vectors.column(i) * lambdas[i]).norm())
        .collect();
    let converged = residuals.len();
    Ok(SpectralSummary {
        lambdas,
        vectors,
        residuals,
        converged,
    })
}

/// Singular values of a real matrix, nonincreasing.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Best Frobenius rank-k approximation A_k = U_k Λ_k U_k^T of a symmetric
/// matrix, built from its k largest-modulus eigenpairs.
pub fn low_rank_truncation(a: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidRank { k, n });
    }
    let eig = full_symmetric_eig(a)?;
    let u = eig.leading_vectors(k);
    let lam = DMatrix::from_diagonal(&DVector::from_iterator(
        k,
        eig.lambdas[..k].iter().copied(),
    ));
    Ok(&u * lam * u.transpose())
}

/// Probabilistic symmetry check: draws two random vectors and compares
/// x^T(A y) with y^T(A x).
fn check_symmetry(op: &dyn SymmetricOperator, rng: &mut ChaCha12Rng) -> Result<()> {
    let n = op.dim();
    let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let ay = op.apply(&y);
    let ax = op.apply(&x);
    let xay: f64 = x.iter().zip(&ay).map(|(a, b)| a * b).sum();
    let yax: f64 = y.iter().zip(&ax).map(|(a, b)| a * b).sum();
    let scale: f64 = ax.iter().chain(ay.iter()).map(|v| v.abs()).fold(0.0, f64::max);
    if (xay - yax).abs() > 1e-8 * (1.0 + scale * n as f64) {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalizes w against the given basis vectors in place (two passes
/// of modified Gram-Schmidt — full reorthogonalization).
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(w, v);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
        }
    }
}

fn random_unit(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let nv = norm(&v);
        if nv > 1e-8 {
            for x in &mut v {
                *x /= nv;
            }
            return v;
        }
    }
}

/// The m largest-modulus eigenpairs of a symmetric operator.
///
/// Dense decomposition below [`DEFAULT_DENSE_THRESHOLD`]; thick-restart
/// Lanczos with full reorthogonalization above. Deterministic for fixed
/// (op, m, tol, seed) regardless of thread count.
pub fn dominant_eigenpairs(
    op: &dyn SymmetricOperator,
    m: usize,
    tol: f64,
    seed: u64,
) -> Result<SpectralSummary> {
    dominant_eigenpairs_with_threshold(op, m, tol, seed, DEFAULT_DENSE_THRESHOLD)
}

/// As [`dominant_eigenpairs`] with an explicit dense-path threshold.
pub fn dominant_eigenpairs_with_threshold(
    op: &dyn SymmetricOperator,
    m: usize,
    tol: f64,
    seed: u64,
    dense_threshold: usize,
) -> Result<SpectralSummary> {
    let n = op.dim();
    if m == 0 || m > n {
        return Err(Error::DimensionMismatch { expected: n, got: m });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    check_symmetry(op, &mut rng)?;

    // The Krylov path needs room to extend the subspace past m; fall back
    // to the dense decomposition when the request covers most of the
    // spectrum anyway.
    if n <= dense_threshold || m + 2 >= n {
        let a = op.materialize();
        let full = full_symmetric_eig(&a)?;
        let lambdas = full.lambdas[..m].to_vec();
        let vectors = full.vectors.columns(0, m).into_owned();
        let residuals = full.residuals[..m].to_vec();
        let converged = residuals
            .iter()
            .filter(|&&r| r <= tol * lambdas[0].abs().max(1.0))
            .count();
        return Ok(SpectralSummary {
            lambdas,
            vectors,
            residuals,
            converged,
        });
    }

    lanczos_thick_restart(op, m, tol, &mut rng)
}

/// Thick-restart Lanczos in Rayleigh-Ritz form: grow an orthonormal basis
/// by Krylov extension with full reorthogonalization, extract Ritz pairs
/// of the projected operator, keep the modulus-dominant ones, restart.
fn lanczos_thick_restart(
    op: &dyn SymmetricOperator,
    m: usize,
    tol: f64,
    rng: &mut ChaCha12Rng,
) -> Result<SpectralSummary> {
    let n = op.dim();
    let ncv = n.min((2 * m + 1).max(20));
    let max_restarts = MAX_RESTARTS_PER_PAIR * m;

    let mut basis: Vec<Vec<f64>> = vec![random_unit(rng, n)];
    let mut next_dir: Option<Vec<f64>> = None;

    for restart in 0..max_restarts {
        // Extend the basis to ncv vectors.
        while basis.len() < ncv {
            let mut w = match next_dir.take() {
                Some(w) => w,
                None => op.apply(basis.last().unwrap()),
            };
            reorthogonalize(&mut w, &basis);
            let nw = norm(&w);
            if nw <= 1e-12 {
                // Krylov breakdown: the space is invariant; continue with a
                // fresh random direction orthogonal to everything so far.
                let mut r = random_unit(rng, n);
                reorthogonalize(&mut r, &basis);
                let nr = norm(&r);
                if nr <= 1e-12 {
                    break; // basis already spans R^n
                }
                for x in &mut r {
                    *x /= nr;
                }
                basis.push(r);
            } else {
                for x in &mut w {
                    *x /= nw;
                }
                basis.push(w);
            }
        }

        let j = basis.len();
        // Rayleigh-Ritz on the current basis.
        let av: Vec<Vec<f64>> = basis.iter().map(|v| op.apply(v)).collect();
        let mut h = DMatrix::zeros(j, j);
        for a in 0..j {
            for b in a..j {
                let v = dot(&basis[a], &av[b]);
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(h);
        let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let order = modulus_order(&raw);

        // Ritz vectors z_c = V y_c and their images A z_c = (A V) y_c.
        let take = j;
        let mut ritz_vals = Vec::with_capacity(take);
        let mut ritz_vecs: Vec<Vec<f64>> = Vec::with_capacity(take);
        let mut ritz_imgs: Vec<Vec<f64>> = Vec::with_capacity(take);
        for &c in order.iter().take(take) {
            let y = eig.eigenvectors.column(c);
            let mut z = vec![0.0; n];
            let mut az = vec![0.0; n];
            for (i, (vb, ab)) in basis.iter().zip(&av).enumerate() {
                let yi = y[i];
                if yi != 0.0 {
                    for r in 0..n {
                        z[r] += yi * vb[r];
                        az[r] += yi * ab[r];
                    }
                }
            }
            ritz_vals.push(raw[c]);
            ritz_vecs.push(z);
            ritz_imgs.push(az);
        }

        let scale = ritz_vals.first().map_or(1.0, |l| l.abs()).max(1.0);
        let residual_of = |idx: usize| -> f64 {
            let z = &ritz_vecs[idx];
            let az = &ritz_imgs[idx];
            let th = ritz_vals[idx];
            (0..n)
                .map(|r| {
                    let d = az[r] - th * z[r];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        };
        let residuals: Vec<f64> = (0..m.min(take)).map(residual_of).collect();
        let all_converged =
            residuals.len() == m && residuals.iter().all(|&r| r <= tol * scale);

        if all_converged {
            let mut vectors = DMatrix::zeros(n, m);
            for c in 0..m {
                for r in 0..n {
                    vectors[(r, c)] = ritz_vecs[c][r];
                }
            }
            canonicalize_signs(&mut vectors);
            return Ok(SpectralSummary {
                lambdas: ritz_vals[..m].to_vec(),
                vectors,
                residuals,
                converged: m,
            });
        }

        if restart + 1 == max_restarts {
            break;
        }

        // Thick restart: keep the modulus-dominant Ritz vectors and seed
        // the next Krylov extension with the image of the best
        // unconverged one.
        let keep = (m + 5).min(j.saturating_sub(2)).max(m.min(j - 1));
        let first_unconverged = residuals
            .iter()
            .position(|&r| r > tol * scale)
            .unwrap_or(0);
        let seed_img = ritz_imgs[first_unconverged].clone();
        basis = ritz_vecs.into_iter().take(keep).collect();
        next_dir = Some(seed_img);
    }

    Err(Error::NoConvergence {
        iterations: max_restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::rngs::StdRng;

    fn random_symmetric(rng: &mut StdRng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn diagonal_spectrum_in_modulus_order() {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&[3.0, -5.0, 1.0]));
        let s = full_symmetric_eig(&a).unwrap();
        assert_eq!(s.lambdas, vec![-5.0, 3.0, 1.0]);
        let op = DenseOperator::new(a);
        let s = dominant_eigenpairs(&op, 3, 1e-10, 1).unwrap();
        assert_eq!(s.lambdas, vec![-5.0, 3.0, 1.0]);
    }

    #[test]
    fn tie_breaks_prefer_positive_eigenvalue() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = full_symmetric_eig(&a).unwrap();
        assert_relative_eq!(s.lambdas[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.lambdas[1], -1.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        let s = full_symmetric_eig(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.lambdas, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn modulus_order_on_mixed_signs() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0]);
        let s = full_symmetric_eig(&a).unwrap();
        assert_eq!(s.lambdas, vec![-3.0, 2.0]);
    }

    #[test]
    fn asymmetric_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(full_symmetric_eig(&a), Err(Error::NotSymmetric)));
    }

    #[test]
    fn triangle_modularity_spectrum() {
        let g = crate::graph::Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let op =
            crate::modularity::ModularityOperator::new(&g, crate::modularity::MeasurePolicy::Unit)
                .unwrap();
        let s = dominant_eigenpairs(&op, 3, 1e-10, 7).unwrap();
        assert_relative_eq!(s.lambdas[0], -1.0, max_relative = 1e-9);
        assert_relative_eq!(s.lambdas[1], -1.0, max_relative = 1e-9);
        assert_abs_diff_eq!(s.lambdas[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn reconstruction_from_full_eig() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_symmetric(&mut rng, 12);
        let s = full_symmetric_eig(&a).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_column_slice(&s.lambdas));
        let rebuilt = &s.vectors * lam * s.vectors.transpose();
        assert!((&a - rebuilt).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn vectors_are_orthonormal() {
        let mut rng = StdRng::seed_from_u64(4);
        let a = random_symmetric(&mut rng, 15);
        let s = full_symmetric_eig(&a).unwrap();
        let gram = s.vectors.transpose() * &s.vectors;
        assert!((gram - DMatrix::identity(15, 15)).norm() <= 1e-8);
    }

    #[test]
    fn sign_convention_is_applied() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_symmetric(&mut rng, 9);
        let s = full_symmetric_eig(&a).unwrap();
        for c in 0..9 {
            let col = s.vectors.column(c);
            let mut best = 0;
            for r in 0..9 {
                if col[r].abs() > col[best].abs() {
                    best = r;
                }
            }
            assert!(col[best] > 0.0);
        }
    }

    #[test]
    fn singular_values_of_swap_and_diag() {
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = singular_values(&swap);
        assert_relative_eq!(s[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(s[1], 1.0, max_relative = 1e-12);

        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[-3.0, 2.0]));
        assert_eq!(singular_values(&d), vec![3.0, 2.0]);
    }

    #[test]
    fn singular_values_match_eigen_moduli() {
        let mut rng = StdRng::seed_from_u64(6);
        let a = random_symmetric(&mut rng, 10);
        let sv = singular_values(&a);
        let mut moduli: Vec<f64> = full_symmetric_eig(&a).unwrap().lambdas.iter().map(|l| l.abs()).collect();
        moduli.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (s, m) in sv.iter().zip(&moduli) {
            assert_abs_diff_eq!(s, m, epsilon = 1e-9);
        }
    }

    #[test]
    fn truncation_error_is_tail_energy() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = random_symmetric(&mut rng, 11);
        let s = full_symmetric_eig(&a).unwrap();
        for k in [1, 4, 11] {
            let ak = low_rank_truncation(&a, k).unwrap();
            let err = (&a - &ak).norm_squared();
            let tail: f64 = s.lambdas[k..].iter().map(|l| l * l).sum();
            assert_abs_diff_eq!(err, tail, epsilon = 1e-10 * (1.0 + tail));
        }
    }

    #[test]
    fn truncation_identity_cases() {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[5.0, 1.0]));
        let t = low_rank_truncation(&d, 1).unwrap();
        assert_relative_eq!(t[(0, 0)], 5.0, max_relative = 1e-12);
        assert_abs_diff_eq!(t[(1, 1)], 0.0, epsilon = 1e-12);
        assert!(low_rank_truncation(&d, 0).is_err());
        assert!(low_rank_truncation(&d, 3).is_err());
    }

    #[test]
    fn lanczos_matches_dense_on_big_operator() {
        let mut rng = StdRng::seed_from_u64(8);
        let n = 600;
        // sparse-ish random symmetric matrix as a graph modularity operator
        let mut edges = Vec::new();
        for i in 0..n {
            for _ in 0..6 {
                let j = rng.gen_range(0..n);
                if j != i {
                    edges.push((i, j, 1.0 + rng.gen::<f64>()));
                }
            }
        }
        let g = crate::graph::Graph::build(n, &edges).unwrap();
        let op =
            crate::modularity::ModularityOperator::new(&g, crate::modularity::MeasurePolicy::Unit)
                .unwrap();
        let m = 6;
        let iterative = dominant_eigenpairs(&op, m, 1e-9, 42).unwrap();
        assert_eq!(iterative.converged, m);
        let dense = full_symmetric_eig(&op.materialize()).unwrap();
        for i in 0..m {
            assert_abs_diff_eq!(
                iterative.lambdas[i],
                dense.lambdas[i],
                epsilon = 1e-7 * dense.lambdas[0].abs().max(1.0)
            );
        }
        // residual certificates
        let scale = iterative.lambdas[0].abs().max(1.0);
        for &r in &iterative.residuals {
            assert!(r <= 1e-9 * scale * 10.0);
        }
    }

    #[test]
    fn lanczos_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(9);
        let n = 550;
        let mut edges = Vec::new();
        for i in 0..n {
            for _ in 0..4 {
                let j = rng.gen_range(0..n);
                if j != i {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let g = crate::graph::Graph::build(n, &edges).unwrap();
        let op =
            crate::modularity::ModularityOperator::new(&g, crate::modularity::MeasurePolicy::Unit)
                .unwrap();
        let a = dominant_eigenpairs(&op, 4, 1e-8, 123).unwrap();
        let b = dominant_eigenpairs(&op, 4, 1e-8, 123).unwrap();
        assert_eq!(a.lambdas, b.lambdas);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn bad_request_sizes_rejected() {
        let op = DenseOperator::new(DMatrix::identity(4, 4));
        assert!(dominant_eigenpairs(&op, 0, 1e-8, 0).is_err());
        assert!(dominant_eigenpairs(&op, 5, 1e-8, 0).is_err());
    }
}
