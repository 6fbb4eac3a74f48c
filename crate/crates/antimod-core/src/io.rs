//! File formats: whitespace edge lists, MatrixMarket coordinate files,
//! block-model spec files, JSON detection reports, spectrum CSVs, and
//! partition label files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detect::DetectionReport;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sbm::SbmSpec;

/// Whether node indices in an edge-list file start at 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexBase {
    Zero,
    #[default]
    One,
}

impl IndexBase {
    fn offset(self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

impl std::fmt::Display for IndexBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.offset())
    }
}

impl FromStr for IndexBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<IndexBase> {
        match s {
            "0" => Ok(IndexBase::Zero),
            "1" => Ok(IndexBase::One),
            other => Err(Error::InvalidConfig(format!(
                "index base must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// Parses a whitespace edge list: one `i j [w]` per line, missing weights
/// default to 1, duplicate pairs (in either orientation) are summed, `#`
/// and `%` start comments. A comment of the form `# n=<N>` fixes the node
/// count; otherwise n is the largest index seen plus one.
pub fn parse_edge_list(path: &Path, base: IndexBase) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let offset = base.offset();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut n_override: Option<usize> = None;
    let mut max_index: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#').or_else(|| line.strip_prefix('%')) {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("n=") {
                let n = value.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad node count in header: {e}"),
                })?;
                n_override = Some(n);
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `i j [w]`, found {} fields", fields.len()),
            });
        }
        let index = |s: &str| -> Result<usize> {
            let raw: usize = s.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad node index {s:?}: {e}"),
            })?;
            if raw < offset {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("index {raw} below the {offset}-based minimum"),
                });
            }
            Ok(raw - offset)
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let w = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad weight {:?}: {e}", fields[2]),
            })?
        } else {
            1.0
        };
        if !(w > 0.0) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("weight must be positive, got {w}"),
            });
        }
        max_index = Some(max_index.unwrap_or(0).max(i).max(j));
        edges.push((i, j, w));
    }

    let n = match (n_override, max_index) {
        (Some(n), _) => n,
        (None, Some(max)) => max + 1,
        (None, None) => 0,
    };
    Graph::build(n, &edges)
}

/// Writes a graph in the edge-list format [`parse_edge_list`] reads,
/// including the `# n=<N>` header so isolated nodes survive the round
/// trip. Weights print in shortest round-trip form, so parse(write(g))
/// reproduces g exactly.
pub fn write_edge_list(path: &Path, g: &Graph, base: IndexBase) -> Result<()> {
    let offset = base.offset();
    let mut out = String::new();
    writeln!(out, "# n={}", g.n()).unwrap();
    for (i, j, w) in g.undirected_edges() {
        writeln!(out, "{} {} {}", i + offset, j + offset, w).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses a MatrixMarket coordinate file into an undirected graph.
///
/// Accepted headers: `%%MatrixMarket matrix coordinate <real|integer|
/// pattern> <symmetric|general>`. General matrices are symmetrized as
/// (A + Aᵀ)/2 with the diagonal kept as-is; pattern entries weigh 1;
/// `binarize` maps every nonzero symmetrized weight to 1. Explicit zeros
/// are dropped, duplicates are summed.
pub fn parse_matrix_market(path: &Path, binarize: bool) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!(
            "not a MatrixMarket matrix header: {header:?}"
        )));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!(
            "only coordinate format is supported, got {:?}",
            tokens[2]
        )));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported field type {other:?}"
            )))
        }
    };
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported symmetry {other:?}"
            )))
        }
    };

    // size line: first non-comment line after the header
    let mut size: Option<(usize, usize, usize)> = None;
    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (lineno, raw) in lines {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `rows cols nnz`, found {} fields", fields.len()),
                });
            }
            let dims: Vec<usize> = fields
                .iter()
                .map(|s| {
                    s.parse().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad size field {s:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if dims[0] != dims[1] {
                return Err(Error::UnsupportedFormat(format!(
                    "adjacency matrices must be square, got {}x{}",
                    dims[0], dims[1]
                )));
            }
            size = Some((dims[0], dims[1], dims[2]));
            continue;
        }

        let expected = if pattern { 2 } else { 3 };
        if fields.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let n = size.unwrap().0;
        let index = |s: &str| -> Result<usize> {
            let raw: usize = s.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad index {s:?}: {e}"),
            })?;
            if raw < 1 || raw > n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("index {raw} outside 1..={n}"),
                });
            }
            Ok(raw - 1)
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let v = if pattern {
            1.0
        } else {
            fields[2].parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad value {:?}: {e}", fields[2]),
            })?
        };
        if symmetric {
            // a symmetric entry names the unordered pair directly
            let key = (i.min(j), i.max(j));
            *directed.entry(key).or_insert(0.0) += v;
        } else {
            *directed.entry((i, j)).or_insert(0.0) += v;
        }
    }

    let (n, _, _) = size.ok_or(Error::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;

    // symmetrize the general case: w_ij = (a_ij + a_ji)/2, diagonal as-is
    let mut undirected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    if symmetric {
        undirected = directed;
    } else {
        for (&(i, j), &v) in &directed {
            let key = (i.min(j), i.max(j));
            let w = if i == j { v } else { v / 2.0 };
            *undirected.entry(key).or_insert(0.0) += w;
        }
    }

    let edges: Vec<(usize, usize, f64)> = undirected
        .into_iter()
        .filter(|&(_, w)| w != 0.0)
        .map(|((i, j), w)| (i, j, if binarize { 1.0 } else { w }))
        .collect();
    Graph::build(n, &edges)
}

/// Parses a block-model spec file: first content line `sizes: n_1 … n_k`,
/// then k whitespace-separated rows of the connectivity matrix B. Blank
/// lines and `#` comments are skipped. Entries outside [0, 1] put the spec
/// in analysis-only average-weight mode (sampling rejects it).
pub fn parse_sbm_spec(path: &Path) -> Result<SbmSpec> {
    let text = fs::read_to_string(path)?;
    let mut sizes: Option<Vec<usize>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if sizes.is_none() {
            let rest = line.strip_prefix("sizes:").ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected a `sizes: n_1 n_2 …` line".into(),
            })?;
            let parsed: Vec<usize> = rest
                .split_whitespace()
                .map(|s| {
                    s.parse().map_err(|e| Error::Parse {
                        line: lineno,
                        msg: format!("bad block size {s:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if parsed.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "sizes line lists no blocks".into(),
                });
            }
            sizes = Some(parsed);
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| {
                s.parse().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad connectivity entry {s:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        let k = sizes.as_ref().unwrap().len();
        if row.len() != k {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("connectivity row has {} entries, expected {k}", row.len()),
            });
        }
        if rows.len() == k {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than {k} connectivity rows"),
            });
        }
        rows.push(row);
    }

    let sizes = sizes.ok_or(Error::Parse {
        line: 1,
        msg: "missing `sizes:` line".into(),
    })?;
    let k = sizes.len();
    if rows.len() != k {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("found {} connectivity rows, expected {k}", rows.len()),
        });
    }
    let b = nalgebra::DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    match SbmSpec::new(sizes.clone(), b.clone()) {
        Ok(spec) => Ok(spec),
        Err(Error::ProbabilityOutOfRange { .. }) => SbmSpec::new_average_weight(sizes, b),
        Err(e) => Err(e),
    }
}

/// Parses a partition label file: one nonnegative integer per line, in
/// node order; blank lines and `#` comments are skipped.
pub fn parse_partition_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        labels.push(line.parse().map_err(|e| Error::Parse {
            line: lineno + 1,
            msg: format!("bad label {line:?}: {e}"),
        })?);
    }
    Ok(labels)
}

/// JSON shape of a serialized detection report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportFile {
    pub meta: ReportMeta,
    pub eigenvalues: Vec<f64>,
    /// Separation ratios; `null` where the ratio is infinite.
    pub ratios: Vec<Option<f64>>,
    pub clusters: Vec<ReportCluster>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportMeta {
    pub n: usize,
    pub m: usize,
    pub measure: String,
    pub seed: u64,
    pub k_selected: usize,
    pub clusters_mode: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportCluster {
    pub id: usize,
    pub size: usize,
    #[serde(rename = "Q")]
    pub modularity: f64,
    /// Normalized modularity; `null` for zero-measure clusters.
    pub q: Option<f64>,
    pub classification: String,
    /// Sorted ascending.
    pub members: Vec<usize>,
}

impl ReportFile {
    pub fn from_report(report: &DetectionReport) -> ReportFile {
        ReportFile {
            meta: ReportMeta {
                n: report.n,
                m: report.num_edges,
                measure: report.measure.to_string(),
                seed: report.seed,
                k_selected: report.k_selected,
                clusters_mode: report.clusters_mode.to_string(),
            },
            eigenvalues: report.eigenvalues.clone(),
            ratios: report
                .ratios
                .iter()
                .map(|&r| r.is_finite().then_some(r))
                .collect(),
            clusters: report
                .clusters
                .iter()
                .map(|c| ReportCluster {
                    id: c.id,
                    size: c.size,
                    modularity: c.modularity,
                    q: c.normalized_modularity,
                    classification: c.classification.to_string(),
                    members: c.members.clone(),
                })
                .collect(),
        }
    }
}

/// Pretty-printed JSON text of a detection report, with trailing newline.
/// serde_json prints floats in shortest round-trip form, so full precision
/// survives.
pub fn report_json_string(report: &DetectionReport) -> String {
    let file = ReportFile::from_report(report);
    let mut text = serde_json::to_string_pretty(&file).expect("report serialization");
    text.push('\n');
    text
}

/// Writes a detection report as pretty-printed JSON.
pub fn write_report(path: &Path, report: &DetectionReport) -> Result<()> {
    fs::write(path, report_json_string(report))?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: format!("bad report JSON: {e}"),
    })
}

/// The spectrum CSV behind ratio plots: `index,eigenvalue,|lambda|,ratio`,
/// one row per eigenvalue, 1-based indices. Infinite ratios print as
/// `inf`; the trailing eigenvalue (and anything past the ratio list) has
/// an empty ratio field.
pub fn spectrum_csv_string(lambdas: &[f64], ratios: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue,|lambda|,ratio\n");
    for (i, l) in lambdas.iter().enumerate() {
        let ratio = match ratios.get(i) {
            Some(r) if r.is_finite() => format!("{r}"),
            Some(_) => "inf".to_string(),
            None => String::new(),
        };
        writeln!(out, "{},{},{},{}", i + 1, l, l.abs(), ratio).unwrap();
    }
    out
}

/// Writes the spectrum CSV to a file.
pub fn write_spectrum_csv(path: &Path, lambdas: &[f64], ratios: &[f64]) -> Result<()> {
    fs::write(path, spectrum_csv_string(lambdas, ratios))?;
    Ok(())
}
