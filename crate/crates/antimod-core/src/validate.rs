//! Randomized self-certification suites.
//!
//! Each suite draws a deterministic instance family from a seed, evaluates
//! one family of identities or inequalities at a stated tolerance, and
//! reports the worst slack it observed. The CLI `validate` subcommand and
//! the acceptance tests both run these, so the numbers printed by the two
//! surfaces always agree.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::detect::{adjusted_rand_index, detect, Classification, DetectionConfig};
use crate::error::Error;
use crate::graph::{Graph, NodeSet, Partition};
use crate::modularity::{
    modularity, normalized_modularity, rayleigh_quotient, MeasurePolicy, ModularityOperator,
};
use crate::sbm::{average_modularity, lift_eigenvector, reduced_modularity, sample, SbmSpec};
use crate::spectral::{
    dominant_eigenpairs, full_symmetric_eig, low_rank_truncation, singular_values, DenseOperator,
    DEFAULT_TOL,
};
use crate::subspace::{eigenspace_bounds, eigenvalue_bounds, project_H, OrthonormalFrame};

/// Slack floor for inequality suites: a bound is accepted when
/// rhs − lhs ≥ −1e-9.
pub const SLACK_FLOOR: f64 = -1e-9;

/// Result of one certification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    /// Content-based suite name, stable across releases.
    pub name: &'static str,
    /// Instances evaluated (skips excluded).
    pub trials: usize,
    /// Instances skipped for a documented structural reason.
    pub skipped: usize,
    /// Violations of the suite's tolerance.
    pub failures: usize,
    /// Misses of advisory (non-theorem) diagnostics; reported but never
    /// failing the suite.
    pub advisory: usize,
    /// Worst slack observed: allowed − observed for equality checks,
    /// rhs − lhs for inequalities; +∞ when nothing was evaluated.
    pub min_slack: f64,
    /// Note about the worst instance or the first failure.
    pub detail: String,
    pub pass: bool,
}

impl SuiteOutcome {
    /// One-line human-readable summary.
    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "{:<28} trials={:<4} skipped={:<3} failures={:<3} min_slack={:>+10.3e}  {}",
            self.name,
            self.trials,
            self.skipped,
            self.failures,
            self.min_slack,
            if self.pass { "pass" } else { "FAIL" }
        );
        if self.advisory > 0 {
            line.push_str(&format!(" (advisory misses: {})", self.advisory));
        }
        line
    }
}

/// Shared bookkeeping for the suites.
struct Accumulator {
    trials: usize,
    skipped: usize,
    failures: usize,
    advisory: usize,
    min_slack: f64,
    slack_context: String,
    failure_context: String,
    advisory_context: String,
}

impl Accumulator {
    fn new() -> Accumulator {
        Accumulator {
            trials: 0,
            skipped: 0,
            failures: 0,
            advisory: 0,
            min_slack: f64::INFINITY,
            slack_context: String::new(),
            failure_context: String::new(),
            advisory_context: String::new(),
        }
    }

    /// Records one slack value; slack < floor (or NaN) counts as a failure.
    fn record(&mut self, slack: f64, floor: f64, ctx: &str) {
        if slack < self.min_slack {
            self.min_slack = slack;
            self.slack_context = ctx.to_string();
        }
        if !(slack >= floor) {
            self.fail(format!("{ctx}: slack {slack:e} below {floor:e}"));
        }
    }

    /// Records a failure that is not a slack violation (structural checks,
    /// unexpected errors).
    fn fail(&mut self, ctx: String) {
        self.failures += 1;
        if self.failure_context.is_empty() {
            self.failure_context = ctx;
        }
    }

    /// Records a miss of an advisory diagnostic: surfaced in the outcome
    /// but never a suite failure.
    fn advise(&mut self, ctx: String) {
        self.advisory += 1;
        if self.advisory_context.is_empty() {
            self.advisory_context = ctx;
        }
    }

    fn finish(self, name: &'static str, pass: bool) -> SuiteOutcome {
        let mut detail = if !self.failure_context.is_empty() {
            self.failure_context
        } else if self.slack_context.is_empty() {
            String::from("no checks evaluated")
        } else {
            format!("worst: {}", self.slack_context)
        };
        if !self.advisory_context.is_empty() {
            detail.push_str("; advisory: ");
            detail.push_str(&self.advisory_context);
        }
        SuiteOutcome {
            name,
            trials: self.trials,
            skipped: self.skipped,
            failures: self.failures,
            advisory: self.advisory,
            min_slack: self.min_slack,
            detail,
            pass,
        }
    }
}

/// Per-trial generator stream: independent of how many values other trials
/// consume.
fn trial_rng(seed: u64, trial: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn random_symmetric(rng: &mut ChaCha12Rng, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen::<f64>() * 2.0 - 1.0;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

fn random_orthonormal_frame(
    rng: &mut ChaCha12Rng,
    n: usize,
    k: usize,
) -> Option<OrthonormalFrame> {
    for _ in 0..16 {
        let a = DMatrix::from_fn(n, k, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let q = a.qr().q();
        if let Ok(frame) = OrthonormalFrame::new(q.columns(0, k).into_owned()) {
            return Some(frame);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Block-model spectral equivalence
// ---------------------------------------------------------------------------

/// Checks, on random block-model specs (k ≤ 6 blocks, n ≤ 300 nodes), that
/// the n×n average modularity matrix and its k×k reduced form have the same
/// nonzero spectrum (at most k−1 values, matched to 1e-10 of the spectral
/// radius) and that block-constant lifts of reduced eigenvectors are
/// eigenvectors of the full matrix (residuals ≤ 1e-10 of the spectral
/// radius).
pub fn sbm_equivalence_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let k = rng.gen_range(1..=6usize);
        let max_size = (300 / k).max(2);
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=max_size)).collect();
        let mut b = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                // Bounded away from the all-zero matrix so ν > 0 always.
                let v: f64 = 0.02 + 0.98 * rng.gen::<f64>();
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let spec = match SbmSpec::new(sizes, b) {
            Ok(s) => s,
            Err(e) => {
                acc.fail(format!("trial {t}: spec rejected: {e}"));
                continue;
            }
        };

        let (mbar, reduced) = match (
            average_modularity(&spec, false),
            reduced_modularity(&spec, false),
        ) {
            (Ok(m), Ok(r)) => (m, r),
            (m, r) => {
                let e = m.err().or(r.err()).unwrap();
                acc.fail(format!("trial {t}: average construction failed: {e}"));
                continue;
            }
        };
        let (dense_eig, reduced_eig) = match (
            full_symmetric_eig(&mbar),
            full_symmetric_eig(&reduced.reduced),
        ) {
            (Ok(d), Ok(r)) => (d, r),
            (d, r) => {
                let e = d.err().or(r.err()).unwrap();
                acc.fail(format!("trial {t}: eigendecomposition failed: {e}"));
                continue;
            }
        };
        acc.trials += 1;

        // Degenerate specs (k = 1, or near-uniform connectivity) have an
        // all-zero modularity matrix: the observed spectral radius is then
        // floating-point noise, so the zero cutoff needs a floor at the
        // data scale n·max|b_ij| (an operator-norm bound for the average
        // adjacency, hence for everything built from it).
        let bmax = spec
            .connectivity()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let data_scale = spec.n() as f64 * bmax;
        let radius = dense_eig
            .lambdas
            .first()
            .map(|l| l.abs())
            .unwrap_or(0.0)
            .max(reduced_eig.lambdas.first().map(|l| l.abs()).unwrap_or(0.0));
        let scale = radius.max(1e-3 * data_scale).max(f64::MIN_POSITIVE);
        let cutoff = 1e-9 * scale;
        let tol = 1e-10 * scale;

        let mut dense_nz: Vec<f64> = dense_eig
            .lambdas
            .iter()
            .copied()
            .filter(|l| l.abs() > cutoff)
            .collect();
        let mut reduced_nz: Vec<f64> = reduced_eig
            .lambdas
            .iter()
            .copied()
            .filter(|l| l.abs() > cutoff)
            .collect();
        if dense_nz.len() != reduced_nz.len() || reduced_nz.len() > spec.k() - 1 {
            acc.fail(format!(
                "trial {t}: nonzero counts dense={} reduced={} (k={})",
                dense_nz.len(),
                reduced_nz.len(),
                spec.k()
            ));
            continue;
        }
        dense_nz.sort_by(|a, b| b.partial_cmp(a).unwrap());
        reduced_nz.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (d, r) in dense_nz.iter().zip(&reduced_nz) {
            acc.record(tol - (d - r).abs(), 0.0, &format!("trial {t}: eigenvalue match"));
        }

        for (j, lambda) in reduced_eig.lambdas.iter().enumerate() {
            let v: Vec<f64> = reduced_eig.vectors.column(j).iter().copied().collect();
            let z = match lift_eigenvector(&v, &spec) {
                Ok(z) => DVector::from_vec(z),
                Err(e) => {
                    acc.fail(format!("trial {t}: lift failed: {e}"));
                    continue;
                }
            };
            let residual = (&mbar * &z - &z * *lambda).norm();
            acc.record(tol - residual, 0.0, &format!("trial {t}: lift residual"));
        }
    }
    let pass = acc.failures == 0;
    acc.finish("sbm-equivalence", pass)
}

// ---------------------------------------------------------------------------
// Shared instances for the bound suites
// ---------------------------------------------------------------------------

struct BoundInstance {
    g: Graph,
    partition: Partition,
    policy: MeasurePolicy,
}

fn assortative_spec(rng: &mut ChaCha12Rng) -> SbmSpec {
    let kb = rng.gen_range(2..=4usize);
    let max_size = 50 / kb;
    let sizes: Vec<usize> = (0..kb).map(|_| rng.gen_range(5..=max_size)).collect();
    let p_out = 0.02 + 0.13 * rng.gen::<f64>();
    let mut b = DMatrix::from_element(kb, kb, p_out);
    for i in 0..kb {
        b[(i, i)] = 0.55 + 0.35 * rng.gen::<f64>();
    }
    SbmSpec::new(sizes, b).expect("assortative spec is valid")
}

fn bipartite_spec(rng: &mut ChaCha12Rng) -> SbmSpec {
    let sizes = vec![rng.gen_range(8..=24usize), rng.gen_range(8..=24usize)];
    let within = 0.06 * rng.gen::<f64>();
    let across = 0.6 + 0.35 * rng.gen::<f64>();
    let b = DMatrix::from_fn(2, 2, |i, j| if i == j { within } else { across });
    SbmSpec::new(sizes, b).expect("bipartite spec is valid")
}

fn mixed_spec(rng: &mut ChaCha12Rng) -> SbmSpec {
    let sizes = vec![
        rng.gen_range(12..=16usize),
        rng.gen_range(7..=12usize),
        rng.gen_range(7..=12usize),
    ];
    let noise = 0.04 + 0.06 * rng.gen::<f64>();
    let mut b = DMatrix::from_element(3, 3, noise);
    b[(0, 0)] = 0.7 + 0.25 * rng.gen::<f64>();
    b[(1, 1)] = 0.04 * rng.gen::<f64>();
    b[(2, 2)] = 0.04 * rng.gen::<f64>();
    let across = 0.6 + 0.3 * rng.gen::<f64>();
    b[(1, 2)] = across;
    b[(2, 1)] = across;
    SbmSpec::new(sizes, b).expect("mixed spec is valid")
}

/// The instance family behind both bound suites: planted structures (the
/// partitions track genuine communities/anti-communities, so modularities
/// and leading eigenvalues agree in sign), rotating over assortative,
/// bipartite and mixed shapes and over unit/offset measures. n ≤ 50.
fn bound_instance(trial: usize, seed: u64) -> Option<BoundInstance> {
    let mut rng = trial_rng(seed, trial);
    for attempt in 0..8u64 {
        let spec = match trial % 3 {
            0 => assortative_spec(&mut rng),
            1 => bipartite_spec(&mut rng),
            _ => mixed_spec(&mut rng),
        };
        let sample_seed = rng.gen::<u64>().wrapping_add(attempt);
        let g = match sample(&spec, sample_seed) {
            Ok(g) => g,
            Err(_) => continue,
        };
        if g.num_edges() == 0 {
            continue;
        }
        let policy = if (trial / 3) % 2 == 0 {
            MeasurePolicy::Unit
        } else {
            MeasurePolicy::offset_with_average_degree(&g)
        };
        let partition = Partition::from_labels(&spec.block_labels());
        return Some(BoundInstance {
            g,
            partition,
            policy,
        });
    }
    None
}

/// Checks the two eigenvalue-approximation inequalities (`eigenvalue-energy`
/// and `modularity-deviation`) with slack ≥ −1e-9 on planted instances with
/// n ≤ 50, and that whenever s < 1 some part satisfies the modulus ratio
/// interval 1−s ≤ |q(C_i)/λ_i| ≤ 1+s (guaranteed by the deviation bound).
/// The signed variant q(C_i)/λ_i ∈ [1−s, 1+s] additionally needs sign
/// agreement, which planted structure usually — not provably — supplies;
/// instances where it misses are counted as advisory, not failures.
pub fn eigenvalue_bound_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let inst = match bound_instance(t, seed) {
            Some(i) => i,
            None => {
                acc.skipped += 1;
                continue;
            }
        };
        let op = match ModularityOperator::new(&inst.g, inst.policy) {
            Ok(o) => o,
            Err(e) => {
                acc.fail(format!("trial {t}: operator: {e}"));
                continue;
            }
        };
        let k = inst.partition.k();
        let spectrum = match dominant_eigenpairs(&op, k, DEFAULT_TOL, seed ^ t as u64) {
            Ok(s) => s,
            Err(e) => {
                acc.fail(format!("trial {t}: spectrum: {e}"));
                continue;
            }
        };
        match eigenvalue_bounds(&op, &inst.partition, &spectrum) {
            Ok(report) => {
                acc.trials += 1;
                for rec in &report.records {
                    acc.record(rec.slack(), SLACK_FLOOR, &format!("trial {t}: {}", rec.name));
                }
                if report.sine < 1.0 {
                    if report.ratio_index.is_none() {
                        acc.advise(format!(
                            "trial {t}: no signed ratio in [1−s, 1+s] (s = {:.6})",
                            report.sine
                        ));
                    }
                    let s = report.sine;
                    let modulus_hit = report
                        .ordered_q
                        .iter()
                        .zip(&spectrum.lambdas)
                        .any(|(q, l)| {
                            *l != 0.0 && {
                                let r = (q / l).abs();
                                (1.0 - s..=1.0 + s).contains(&r)
                            }
                        });
                    if !modulus_hit {
                        acc.fail(format!("trial {t}: modulus ratio interval empty"));
                    }
                }
            }
            Err(e) => acc.fail(format!("trial {t}: bounds: {e}")),
        }
    }
    let pass = acc.failures == 0;
    acc.finish("eigenvalue-bounds", pass)
}

/// Checks the eigenspace-alignment and Procrustes-distance inequalities
/// with slack ≥ −1e-9 on the same instances as [`eigenvalue_bound_suite`].
/// Instances whose k-th eigenvalue is numerically zero are skipped and
/// counted; the suite fails if they exceed 20% of the instances.
pub fn eigenspace_bound_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let inst = match bound_instance(t, seed) {
            Some(i) => i,
            None => {
                acc.skipped += 1;
                continue;
            }
        };
        let op = match ModularityOperator::new(&inst.g, inst.policy) {
            Ok(o) => o,
            Err(e) => {
                acc.fail(format!("trial {t}: operator: {e}"));
                continue;
            }
        };
        let k = inst.partition.k();
        let spectrum = match dominant_eigenpairs(&op, k, DEFAULT_TOL, seed ^ t as u64) {
            Ok(s) => s,
            Err(e) => {
                acc.fail(format!("trial {t}: spectrum: {e}"));
                continue;
            }
        };
        match eigenspace_bounds(&op, &inst.partition, &spectrum) {
            Ok(report) => {
                acc.trials += 1;
                for rec in &report.records {
                    acc.record(rec.slack(), SLACK_FLOOR, &format!("trial {t}: {}", rec.name));
                }
            }
            Err(Error::ZeroLeadingEigenvalue { .. }) => acc.skipped += 1,
            Err(e) => acc.fail(format!("trial {t}: bounds: {e}")),
        }
    }
    let pass = acc.failures == 0 && acc.skipped * 5 < trials.max(1);
    acc.finish("eigenspace-bounds", pass)
}

// ---------------------------------------------------------------------------
// Angle-maximization identity
// ---------------------------------------------------------------------------

/// Checks, for random dense symmetric matrices (n ≤ 30) and a k chosen at a
/// modulus gap, that cos(A, H(U_k))² equals Σ_{i≤k}λ_i²/Σλ_i² to 1e-9, and
/// that no random competitor frame (100 per matrix) exceeds that value by
/// more than 1e-9.
pub fn maxcos_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let n = rng.gen_range(4..=30usize);
        let a = random_symmetric(&mut rng, n);
        let eig = match full_symmetric_eig(&a) {
            Ok(e) => e,
            Err(e) => {
                acc.fail(format!("trial {t}: eig: {e}"));
                continue;
            }
        };
        let radius = eig.lambdas[0].abs().max(1e-12);
        let start = rng.gen_range(1..n);
        let mut chosen = None;
        for off in 0..(n - 1) {
            let k = 1 + (start - 1 + off) % (n - 1);
            if eig.lambdas[k - 1].abs() - eig.lambdas[k].abs() > 1e-6 * radius {
                chosen = Some(k);
                break;
            }
        }
        let k = match chosen {
            Some(k) => k,
            None => {
                acc.skipped += 1;
                continue;
            }
        };

        let total: f64 = eig.lambdas.iter().map(|l| l * l).sum();
        let top: f64 = eig.lambdas[..k].iter().map(|l| l * l).sum();
        let predicted_sq = top / total;

        let frame = match OrthonormalFrame::new(eig.leading_vectors(k)) {
            Ok(f) => f,
            Err(e) => {
                acc.fail(format!("trial {t}: eigenvector frame: {e}"));
                continue;
            }
        };
        let op = DenseOperator::new(a);
        let measured_sq = match project_H(&op, &frame) {
            Ok(p) => p.cosine * p.cosine,
            Err(e) => {
                acc.fail(format!("trial {t}: projection: {e}"));
                continue;
            }
        };
        acc.trials += 1;
        acc.record(
            1e-9 - (measured_sq - predicted_sq).abs(),
            0.0,
            &format!("trial {t}: identity (n={n}, k={k})"),
        );

        for c in 0..100 {
            let competitor = match random_orthonormal_frame(&mut rng, n, k) {
                Some(f) => f,
                None => continue,
            };
            match project_H(&op, &competitor) {
                Ok(p) => acc.record(
                    predicted_sq + 1e-9 - p.cosine * p.cosine,
                    0.0,
                    &format!("trial {t}: competitor {c}"),
                ),
                Err(e) => acc.fail(format!("trial {t}: competitor {c}: {e}")),
            }
        }
    }
    let pass = acc.failures == 0;
    acc.finish("maxcos-identity", pass)
}

// ---------------------------------------------------------------------------
// Modularity identities
// ---------------------------------------------------------------------------

/// Checks the exact modularity identities on random weighted graphs:
/// Q(V) = 0, Q(C) = Q(C̄), M̂·1 = 0, the Rayleigh identity
/// χ_C^T M χ_C = q(C) for every valid measure policy, and
/// Q(side) = −vol/4 on complete bipartite graphs (equal side volumes).
/// Tolerances are 1e-10 at the volume scale of each identity.
pub fn modularity_identity_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let n = rng.gen_range(4..=40usize);
        let p = 0.15 + 0.7 * rng.gen::<f64>();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j, 0.5 + rng.gen::<f64>()));
                }
            }
        }
        if edges.is_empty() {
            edges.push((0, 1, 1.0));
        }
        let g = match Graph::build(n, &edges) {
            Ok(g) => g,
            Err(e) => {
                acc.fail(format!("trial {t}: graph: {e}"));
                continue;
            }
        };
        acc.trials += 1;
        let vol = g.volume();
        let tol = 1e-10 * vol.max(1.0);

        match modularity(&g, &NodeSet::full(n)) {
            Ok(qv) => acc.record(tol - qv.abs(), 0.0, &format!("trial {t}: Q(V)")),
            Err(e) => acc.fail(format!("trial {t}: Q(V): {e}")),
        }

        let mut members = Vec::new();
        for i in 0..n {
            if rng.gen_bool(0.5) {
                members.push(i);
            }
        }
        if members.is_empty() {
            members.push(rng.gen_range(0..n));
        }
        if members.len() == n {
            members.pop();
        }
        let c = NodeSet::new(members);
        match c
            .complement(n)
            .and_then(|cbar| Ok((modularity(&g, &c)?, modularity(&g, &cbar)?)))
        {
            Ok((qc, qcc)) => {
                acc.record(tol - (qc - qcc).abs(), 0.0, &format!("trial {t}: Q(C)=Q(C̄)"))
            }
            Err(e) => acc.fail(format!("trial {t}: complement pair failed: {e}")),
        }

        match ModularityOperator::new(&g, MeasurePolicy::Unit) {
            Ok(op) => {
                let out = op.apply(&vec![1.0; n]);
                let worst = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                acc.record(tol - worst, 0.0, &format!("trial {t}: M̂·1"));
            }
            Err(e) => acc.fail(format!("trial {t}: unit operator: {e}")),
        }

        let policies = [
            MeasurePolicy::Unit,
            MeasurePolicy::Degree,
            MeasurePolicy::offset_with_average_degree(&g),
        ];
        for policy in policies {
            if matches!(policy, MeasurePolicy::Degree) && g.degrees().iter().any(|d| *d <= 0.0)
            {
                continue;
            }
            let mu = policy.measure_of(&g, &c);
            if mu <= 0.0 {
                continue;
            }
            let op = match ModularityOperator::new(&g, policy) {
                Ok(o) => o,
                Err(e) => {
                    acc.fail(format!("trial {t}: operator ({policy}): {e}"));
                    continue;
                }
            };
            match (rayleigh_quotient(&op, &c), normalized_modularity(&g, &c, policy)) {
                (Ok(r), Ok(q)) => {
                    let tol_q = 1e-10 * (vol / mu).max(1.0);
                    acc.record(
                        tol_q - (r - q).abs(),
                        0.0,
                        &format!("trial {t}: Rayleigh ({policy})"),
                    );
                }
                _ => acc.fail(format!("trial {t}: Rayleigh pair failed ({policy})")),
            }
        }

        let a_size = rng.gen_range(1..=12usize);
        let b_size = rng.gen_range(1..=12usize);
        let w = 0.2 + 1.8 * rng.gen::<f64>();
        let mut kab_edges = Vec::new();
        for i in 0..a_size {
            for j in 0..b_size {
                kab_edges.push((i, a_size + j, w));
            }
        }
        match Graph::build(a_size + b_size, &kab_edges) {
            Ok(kab) => {
                let side = NodeSet::new(0..a_size);
                match modularity(&kab, &side) {
                    Ok(qs) => {
                        let volk = kab.volume();
                        acc.record(
                            1e-10 * volk.max(1.0) - (qs + volk / 4.0).abs(),
                            0.0,
                            &format!("trial {t}: bipartite side"),
                        );
                    }
                    Err(e) => acc.fail(format!("trial {t}: bipartite side: {e}")),
                }
            }
            Err(e) => acc.fail(format!("trial {t}: bipartite graph: {e}")),
        }
    }
    let pass = acc.failures == 0;
    acc.finish("modularity-identities", pass)
}

// ---------------------------------------------------------------------------
// End-to-end recovery
// ---------------------------------------------------------------------------

/// The planted 5-block benchmark: two assortative blocks, one bipartite
/// anti-community pair, and a large background block.
pub fn recovery_benchmark_spec() -> SbmSpec {
    let sizes = vec![100, 100, 60, 60, 180];
    let mut b = DMatrix::from_element(5, 5, 0.05);
    b[(0, 0)] = 0.5;
    b[(1, 1)] = 0.5;
    b[(2, 2)] = 0.02;
    b[(3, 3)] = 0.02;
    b[(2, 3)] = 0.5;
    b[(3, 2)] = 0.5;
    b[(4, 4)] = 0.1;
    SbmSpec::new(sizes, b).expect("benchmark spec is valid")
}

/// Samples the 5-block benchmark once per seed and runs the full pipeline
/// (auto k, k+1 clusters). A seed passes when the report contains ≥ 2
/// communities with q > 0 and ≥ 2 anti-communities with q < 0, and the
/// non-background nodes are recovered with ARI ≥ 0.85 against the planted
/// blocks. The suite passes when ≥ 80% of seeds pass.
pub fn recovery_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    let spec = recovery_benchmark_spec();
    let planted = spec.block_labels();
    let background_block = spec.k() - 1;
    let non_background: Vec<usize> = (0..spec.n())
        .filter(|&i| planted[i] != background_block)
        .collect();

    for t in 0..trials {
        let s = seed.wrapping_add(t as u64);
        let g = match sample(&spec, s) {
            Ok(g) => g,
            Err(e) => {
                acc.fail(format!("seed {s}: sample: {e}"));
                continue;
            }
        };
        let cfg = DetectionConfig {
            seed: s,
            ..DetectionConfig::default()
        };
        let report = match detect(&g, &cfg) {
            Ok(r) => r,
            Err(e) => {
                acc.fail(format!("seed {s}: detect: {e}"));
                continue;
            }
        };
        acc.trials += 1;

        let communities = report
            .clusters
            .iter()
            .filter(|c| {
                c.classification == Classification::Community
                    && c.normalized_modularity.map_or(false, |q| q > 0.0)
            })
            .count();
        let anti = report
            .clusters
            .iter()
            .filter(|c| {
                c.classification == Classification::AntiCommunity
                    && c.normalized_modularity.map_or(false, |q| q < 0.0)
            })
            .count();

        let mut detected = vec![0usize; spec.n()];
        for cluster in &report.clusters {
            for &m in &cluster.members {
                detected[m] = cluster.id;
            }
        }
        let det_nb: Vec<usize> = non_background.iter().map(|&i| detected[i]).collect();
        let pl_nb: Vec<usize> = non_background.iter().map(|&i| planted[i]).collect();
        let ari = match adjusted_rand_index(&det_nb, &pl_nb) {
            Ok(a) => a,
            Err(e) => {
                acc.fail(format!("seed {s}: ari: {e}"));
                continue;
            }
        };

        let slack = if communities >= 2 && anti >= 2 {
            ari - 0.85
        } else {
            -1.0
        };
        if slack < acc.min_slack {
            acc.min_slack = slack;
            acc.slack_context = format!(
                "seed {s}: k={} comm={communities} anti={anti} ari={ari:.4}",
                report.k_selected
            );
        }
        if slack < 0.0 {
            acc.fail(format!(
                "seed {s}: k={} comm={communities} anti={anti} ari={ari:.4}",
                report.k_selected
            ));
        }
    }
    let pass = acc.failures * 5 <= trials;
    acc.finish("block-recovery", pass)
}

// ---------------------------------------------------------------------------
// Matrix analysis oracles
// ---------------------------------------------------------------------------

/// Checks, on random symmetric pairs (n ≤ 25), that sorted singular values
/// move by no more than the Frobenius distance:
/// Σ_i (s_i(A) − s_i(B))² ≤ ‖A−B‖_F² + 1e-9.
pub fn singular_value_perturbation_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let n = rng.gen_range(2..=25usize);
        let a = random_symmetric(&mut rng, n);
        let b = random_symmetric(&mut rng, n);
        let sa = singular_values(&a);
        let sb = singular_values(&b);
        let lhs: f64 = sa
            .iter()
            .zip(&sb)
            .map(|(x, y)| {
                let d = x - y;
                d * d
            })
            .sum();
        let rhs = (&a - &b).norm_squared();
        acc.trials += 1;
        acc.record(rhs - lhs, SLACK_FLOOR, &format!("trial {t} (n={n})"));
    }
    let pass = acc.failures == 0;
    acc.finish("singular-value-perturbation", pass)
}

/// Checks, on random symmetric matrices (n ≤ 25), that the modulus
/// truncation A_k beats 20 random rank-k candidates in Frobenius distance:
/// ‖A−A_k‖_F ≤ ‖A−B‖_F + 1e-9. Half the candidates are random products,
/// half are eigen-truncations over non-optimal eigenvalue subsets.
pub fn low_rank_approximation_suite(trials: usize, seed: u64) -> SuiteOutcome {
    let mut acc = Accumulator::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let n = rng.gen_range(2..=25usize);
        let a = random_symmetric(&mut rng, n);
        let k = rng.gen_range(1..n);
        let ak = match low_rank_truncation(&a, k) {
            Ok(m) => m,
            Err(e) => {
                acc.fail(format!("trial {t}: truncation: {e}"));
                continue;
            }
        };
        let base = (&a - &ak).norm();
        let eig = match full_symmetric_eig(&a) {
            Ok(e) => e,
            Err(e) => {
                acc.fail(format!("trial {t}: eig: {e}"));
                continue;
            }
        };
        acc.trials += 1;

        for c in 0..20 {
            let candidate = if c % 2 == 0 {
                let l = DMatrix::from_fn(n, k, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                let r = DMatrix::from_fn(k, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                l * r
            } else {
                // Eigen-truncation over a random k-subset of the spectrum;
                // optimal exactly when the subset is the top-k by modulus.
                let mut idx: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    let j = rng.gen_range(0..=i);
                    idx.swap(i, j);
                }
                let mut m = DMatrix::zeros(n, n);
                for &i in idx.iter().take(k) {
                    let u = eig.vectors.column(i);
                    m += u * u.transpose() * eig.lambdas[i];
                }
                m
            };
            let dist = (&a - &candidate).norm();
            acc.record(dist - base, SLACK_FLOOR, &format!("trial {t}: candidate {c}"));
        }
    }
    let pass = acc.failures == 0;
    acc.finish("low-rank-approximation", pass)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// All suite names accepted by [`suite_by_name`], in execution order.
pub const SUITE_NAMES: [&str; 8] = [
    "modularity-identities",
    "maxcos-identity",
    "eigenvalue-bounds",
    "eigenspace-bounds",
    "sbm-equivalence",
    "singular-value-perturbation",
    "low-rank-approximation",
    "block-recovery",
];

/// Runs one suite by name. `trials` is the instance count (the seed count
/// for `block-recovery`).
pub fn suite_by_name(name: &str, trials: usize, seed: u64) -> Option<SuiteOutcome> {
    match name {
        "modularity-identities" => Some(modularity_identity_suite(trials, seed)),
        "maxcos-identity" => Some(maxcos_suite(trials, seed)),
        "eigenvalue-bounds" => Some(eigenvalue_bound_suite(trials, seed)),
        "eigenspace-bounds" => Some(eigenspace_bound_suite(trials, seed)),
        "sbm-equivalence" => Some(sbm_equivalence_suite(trials, seed)),
        "singular-value-perturbation" => Some(singular_value_perturbation_suite(trials, seed)),
        "low-rank-approximation" => Some(low_rank_approximation_suite(trials, seed)),
        "block-recovery" => Some(recovery_suite(trials, seed)),
    _ => None,
    }
}

/// Runs every suite at the given trial count. The end-to-end recovery suite
/// is capped at 10 seeds — each of its trials samples and clusters a
/// 500-node graph.
pub fn all_suites(trials: usize, seed: u64) -> Vec<SuiteOutcome> {
    SUITE_NAMES
        .iter()
        .map(|name| {
            let t = if *name == "block-recovery" {
                trials.min(10)
            } else {
                trials
            };
            suite_by_name(name, t, seed).expect("listed suite exists")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modularity_identity_suite_passes() {
        let o = modularity_identity_suite(40, 7);
        assert!(o.pass, "{}", o.summary_line());
        assert_eq!(o.trials, 40);
    }

    #[test]
    fn maxcos_suite_passes() {
        let o = maxcos_suite(15, 11);
        assert!(o.pass, "{}", o.summary_line());
    }

    #[test]
    fn bound_suites_pass() {
        let ev = eigenvalue_bound_suite(12, 5);
        assert!(ev.pass, "{}: {}", ev.summary_line(), ev.detail);
        let es = eigenspace_bound_suite(12, 5);
        assert!(es.pass, "{}: {}", es.summary_line(), es.detail);
    }

    // Seed 2, trial 59 produces a mixed instance whose signed ratios all
    // fall outside [1−s, 1+s]. The provable modulus interval still holds,
    // so the suite must pass and report the miss as advisory only.
    #[test]
    fn signed_ratio_miss_is_advisory_not_failure() {
        let o = eigenvalue_bound_suite(60, 2);
        assert!(o.pass, "{}: {}", o.summary_line(), o.detail);
        assert_eq!(o.failures, 0, "{}", o.detail);
        assert_eq!(o.advisory, 1, "{}", o.detail);
        assert!(
            o.detail.contains("no signed ratio"),
            "advisory context missing: {}",
            o.detail
        );
        assert!(o.summary_line().contains("advisory misses: 1"));
    }

    #[test]
    fn sbm_equivalence_suite_passes() {
        let o = sbm_equivalence_suite(12, 3);
        assert!(o.pass, "{}: {}", o.summary_line(), o.detail);
        assert_eq!(o.trials, 12);
    }

    #[test]
    fn oracle_suites_pass() {
        let hw = singular_value_perturbation_suite(30, 13);
        assert!(hw.pass, "{}", hw.summary_line());
        let ey = low_rank_approximation_suite(15, 13);
        assert!(ey.pass, "{}", ey.summary_line());
    }

    #[test]
    fn recovery_suite_accepts_two_seeds() {
        let o = recovery_suite(2, 0);
        assert_eq!(o.failures, 0, "{}: {}", o.summary_line(), o.detail);
        assert_eq!(o.trials, 2);
    }

    #[test]
    fn suites_are_deterministic() {
        let a = modularity_identity_suite(10, 42);
        let b = modularity_identity_suite(10, 42);
        assert_eq!(a, b);
        assert_eq!(a.min_slack.to_bits(), b.min_slack.to_bits());
    }

    #[test]
    fn suite_dispatch_by_name() {
        for name in SUITE_NAMES {
            if name == "block-recovery" {
                continue; // exercised separately; heavy
            }
            let o = suite_by_name(name, 2, 1).unwrap();
            assert_eq!(o.name, name);
        }
        assert!(suite_by_name("no-such-suite", 2, 1).is_none());
    }
}
