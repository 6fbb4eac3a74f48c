//! Modularity Q(C), normalized modularity q(C) = Q(C)/μ(C), measure
//! vectors, and matrix-free application of the generalized modularity
//! matrices M̂ = A − dd^T/vol(V) and M = W^{-1/2} M̂ W^{-1/2}.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::spectral::SymmetricOperator;

/// Vertex measure μ used to normalize modularity and to weight the
/// embedding: unit (μ=1), degree (μ=d_i), or offset (μ=τ+d_i, so
/// μ(C) = τ|C| + vol(C)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurePolicy {
    Unit,
    Degree,
    Offset(f64),
}

impl MeasurePolicy {
    /// Offset policy with the conventional default τ = average degree.
    pub fn offset_with_average_degree(g: &Graph) -> MeasurePolicy {
        MeasurePolicy::Offset(g.volume() / g.n() as f64)
    }

    /// Per-node measures μ(i).
    pub fn measures(&self, g: &Graph) -> Vec<f64> {
        match *self {
            MeasurePolicy::Unit => vec![1.0; g.n()],
            MeasurePolicy::Degree => g.degrees().to_vec(),
            MeasurePolicy::Offset(tau) => g.degrees().iter().map(|d| tau + d).collect(),
        }
    }

    /// μ(C) = Σ_{i∈C} μ(i).
    pub fn measure_of(&self, g: &Graph, c: &NodeSet) -> f64 {
        match *self {
            MeasurePolicy::Unit => c.len() as f64,
            MeasurePolicy::Degree => c.iter().map(|i| g.degree(i)).sum(),
            MeasurePolicy::Offset(tau) => {
                tau * c.len() as f64 + c.iter().map(|i| g.degree(i)).sum::<f64>()
            }
        }
    }
}

impl fmt::Display for MeasurePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurePolicy::Unit => write!(f, "unit"),
            MeasurePolicy::Degree => write!(f, "degree"),
            MeasurePolicy::Offset(tau) => write!(f, "offset({tau})"),
        }
    }
}

impl FromStr for MeasurePolicy {
    type Err = Error;

    /// Parses "unit", "degree", "offset" (τ defaulted later from the
    /// graph), or "offset:<tau>" / "offset(<tau>)".
    fn from_str(s: &str) -> Result<MeasurePolicy> {
        let s = s.trim();
        match s {
            "unit" => return Ok(MeasurePolicy::Unit),
            "degree" => return Ok(MeasurePolicy::Degree),
            _ => {}
        }
        let tau_str = s
            .strip_prefix("offset:")
            .or_else(|| s.strip_prefix("offset(").and_then(|t| t.strip_suffix(')')));
        if let Some(t) = tau_str {
            let tau: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad offset value {t:?}")))?;
            if tau < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "offset must be nonnegative, got {tau}"
                )));
            }
            return Ok(MeasurePolicy::Offset(tau));
        }
        Err(Error::InvalidConfig(format!(
            "unknown measure policy {s:?}; expected unit, degree, or offset:<tau>"
        )))
    }
}

/// Modularity Q(C) = 1_C^T A 1_C − vol(C)²/vol(V), evaluated with two
/// sparse passes over the rows of C; the matrix M̂ is never materialized.
pub fn modularity(g: &Graph, c: &NodeSet) -> Result<f64> {
    c.validate(g.n())?;
    if g.volume() == 0.0 {
        return Err(Error::EmptyGraph);
    }
    let mut in_c = vec![false; g.n()];
    for i in c.iter() {
        in_c[i] = true;
    }
    let mut internal = 0.0;
    let mut vol_c = 0.0;
    for i in c.iter() {
        vol_c += g.degree(i);
        for (j, w) in g.neighbors(i) {
            if in_c[j] {
                internal += w;
            }
        }
    }
    Ok(internal - vol_c * vol_c / g.volume())
}

/// Normalized modularity q(C) = Q(C)/μ(C).
pub fn normalized_modularity(g: &Graph, c: &NodeSet, p: MeasurePolicy) -> Result<f64> {
    let mu = p.measure_of(g, c);
    if mu <= 0.0 {
        return Err(Error::ZeroMeasure(format!(
            "set of {} nodes has measure {mu} under the {p} policy",
            c.len()
        )));
    }
    Ok(modularity(g, c)? / mu)
}

/// Measure vector χ_C = W^{1/2} 1_C / ‖W^{1/2} 1_C‖₂ — the unit vector
/// supported on C whose Rayleigh quotient with M equals q(C).
pub fn measure_vector(c: &NodeSet, p: MeasurePolicy, g: &Graph) -> Result<Vec<f64>> {
    c.validate(g.n())?;
    let mu_c = p.measure_of(g, c);
    if mu_c <= 0.0 {
        return Err(Error::ZeroMeasure(format!(
            "set of {} nodes has measure {mu_c} under the {p} policy",
            c.len()
        )));
    }
    let mu = p.measures(g);
    let norm = mu_c.sqrt(); // ‖W^{1/2}1_C‖₂² = Σ_{i∈C} μ(i) = μ(C)
    let mut chi = vec![0.0; g.n()];
    for i in c.iter() {
        chi[i] = mu[i].sqrt() / norm;
    }
    Ok(chi)
}

/// Matrix-free representation of M = W^{-1/2}(A − dd^T/vol(V))W^{-1/2}.
///
/// Construction fails fast when the graph has no edges (vol = 0) or when
/// any vertex measure vanishes — e.g. the degree policy on a graph with an
/// isolated node, where W^{-1/2} is singular; the offset policy with τ > 0
/// is the standard remedy.
#[derive(Debug, Clone)]
pub struct ModularityOperator<'a> {
    graph: &'a Graph,
    policy: MeasurePolicy,
    inv_sqrt_mu: Vec<f64>,
}

impl<'a> ModularityOperator<'a> {
    pub fn new(graph: &'a Graph, policy: MeasurePolicy) -> Result<ModularityOperator<'a>> {
        if graph.volume() == 0.0 {
            return Err(Error::EmptyGraph);
        }
        let mu = policy.measures(graph);
        for (i, &m) in mu.iter().enumerate() {
            if m <= 0.0 {
                return Err(Error::ZeroMeasure(format!(
                    "node {i} has measure {m} under the {policy} policy"
                )));
            }
        }
        let inv_sqrt_mu = mu.iter().map(|m| 1.0 / m.sqrt()).collect();
        Ok(ModularityOperator {
            graph,
            policy,
            inv_sqrt_mu,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn policy(&self) -> MeasurePolicy {
        self.policy
    }

    /// Applies M to x in O(nnz): y = W^{-1/2}x, then
    /// W^{-1/2}(A y − d (d^T y)/vol). For the unit policy this is exactly
    /// M̂ x.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        let n = g.n();
        debug_assert_eq!(x.len(), n);
        let y: Vec<f64> = (0..n).map(|i| x[i] * self.inv_sqrt_mu[i]).collect();
        g.matvec_into(&y, out);
        let d_dot_y: f64 = g.degrees().iter().zip(&y).map(|(d, v)| d * v).sum();
        let scale = d_dot_y / g.volume();
        for i in 0..n {
            out[i] = (out[i] - g.degree(i) * scale) * self.inv_sqrt_mu[i];
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.graph.n()];
        self.apply_into(x, &mut out);
        out
    }

    /// Dense n×n materialization m_ij = (a_ij − d_i d_j/vol)/√(μ_i μ_j);
    /// used by the dense eigensolver path and the bound evaluators.
    pub fn materialize(&self) -> DMatrix<f64> {
        let g = self.graph;
        let n = g.n();
        let d = g.degrees();
        let vol = g.volume();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = -d[i] * d[j] / vol * self.inv_sqrt_mu[i] * self.inv_sqrt_mu[j];
            }
        }
        for i in 0..n {
            for (j, w) in g.neighbors(i) {
                m[(i, j)] += w * self.inv_sqrt_mu[i] * self.inv_sqrt_mu[j];
            }
        }
        m
    }

    /// Exact ‖M‖_F in O(nnz + n), by expanding
    /// ‖A' − u u'^T‖_F² = Σ a'_ij² − 2 u^T A' u / vol + (Σ_i d_i²/μ_i)²/vol²
    /// where a'_ij = a_ij/√(μ_iμ_j) and u_i = d_i/μ_i.
    pub fn frobenius_norm_exact(&self) -> f64 {
        let g = self.graph;
        let vol = g.volume();
        let mut sq_sum = 0.0; // Σ_ij a_ij²/(μ_i μ_j)
        let mut quad = 0.0; // Σ_ij a_ij (d_i/μ_i)(d_j/μ_j)
        for i in 0..g.n() {
            let ui = g.degree(i) * self.inv_sqrt_mu[i] * self.inv_sqrt_mu[i];
            for (j, w) in g.neighbors(i) {
                let scaled = w * self.inv_sqrt_mu[i] * self.inv_sqrt_mu[j];
                sq_sum += scaled * scaled;
                quad += w * ui * g.degree(j) * self.inv_sqrt_mu[j] * self.inv_sqrt_mu[j];
            }
        }
        let diag: f64 = (0..g.n())
            .map(|i| {
                let d = g.degree(i);
                d * d * self.inv_sqrt_mu[i] * self.inv_sqrt_mu[i]
            })
            .sum();
        let fro_sq = sq_sum - 2.0 * quad / vol + (diag / vol) * (diag / vol);
        fro_sq.max(0.0).sqrt()
    }
}

impl SymmetricOperator for ModularityOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        ModularityOperator::apply_into(self, x, out)
    }

    fn frobenius_norm(&self) -> Option<f64> {
        Some(self.frobenius_norm_exact())
    }

    fn materialize(&self) -> DMatrix<f64> {
        ModularityOperator::materialize(self)
    }
}

/// Rayleigh quotient χ_C^T M χ_C; by construction it equals q(C).
pub fn rayleigh_quotient(op: &ModularityOperator<'_>, c: &NodeSet) -> Result<f64> {
    let chi = measure_vector(c, op.policy(), op.graph())?;
    let m_chi = op.apply(&chi);
    Ok(chi.iter().zip(&m_chi).map(|(a, b)| a * b).sum())
}
