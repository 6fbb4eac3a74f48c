//! The `antimod` command-line surface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
//! malformed input), 3 numerical failure (non-convergence or degenerate
//! spectra).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use antimod_core::detect::{detect, spectrum_ratios, ClustersMode, DetectionConfig, KSelection};
use antimod_core::graph::{Graph, Partition};
use antimod_core::io::{
    parse_edge_list, parse_matrix_market, parse_partition_labels, parse_sbm_spec,
    report_json_string, spectrum_csv_string, write_edge_list, IndexBase,
};
use antimod_core::modularity::{MeasurePolicy, ModularityOperator};
use antimod_core::sbm::{reduced_modularity, sample};
use antimod_core::spectral::{dominant_eigenpairs, full_symmetric_eig, DEFAULT_TOL};
use antimod_core::subspace::{project_H, project_K, sigma_score, OrthonormalFrame};
use antimod_core::validate::{all_suites, suite_by_name, SuiteOutcome, SUITE_NAMES};

/// A command-line-level mistake (bad flag value, impossible combination);
/// mapped to exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "antimod",
    version,
    about = "Spectral detection of communities and anti-communities in weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full detection pipeline and write a JSON report.
    Detect(DetectArgs),
    /// Compute leading eigenvalues and separation ratios as CSV.
    Spectrum(SpectrumArgs),
    /// Matrix angles between the modularity operator and a partition.
    Angles(AnglesArgs),
    /// Stochastic block model utilities.
    #[command(subcommand)]
    Sbm(SbmCommand),
    /// Run the randomized certification suites.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input graph file.
    #[arg(long)]
    input: PathBuf,
    /// Input format: `edges`, `mtx`, or `auto` (MatrixMarket for
    /// .mtx/.mm extensions, edge list otherwise).
    #[arg(long, default_value = "auto")]
    format: String,
    /// Index base for edge-list files (0 or 1).
    #[arg(long, default_value = "1")]
    base: String,
    /// Binarize MatrixMarket weights after symmetrization.
    #[arg(long)]
    binarize: bool,
}

#[derive(Args, Debug)]
struct MeasureArg {
    /// Vertex measure: `unit`, `degree`, `offset` (degree plus the average
    /// degree), or `offset(<tau>)` with an explicit positive offset.
    #[arg(long, default_value = "unit")]
    measure: String,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArg,
    /// Number of leading eigenvalues to cluster on: `auto` or an integer.
    #[arg(long, default_value = "auto")]
    k: String,
    /// Upper bound for automatic k selection.
    #[arg(long, default_value_t = 20)]
    max_k: usize,
    /// Separation threshold for the eigenvalue ratio rule.
    #[arg(long, default_value_t = 1.25)]
    ratio_threshold: f64,
    /// Cluster count: `k_plus_one` (background-aware) or `k`.
    #[arg(long, default_value = "k_plus_one")]
    clusters: String,
    /// Keep embedding rows at their natural scale instead of dividing by
    /// sqrt of the vertex measure.
    #[arg(long)]
    no_scale_rows: bool,
    /// Seed for the eigensolver probe and k-means restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// k-means restarts.
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Report destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the spectrum CSV here.
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArg,
    /// How many leading eigenvalues to compute (clamped to n).
    #[arg(long, default_value_t = 21)]
    count: usize,
    /// Seed for the eigensolver probe.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnglesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    measure: MeasureArg,
    /// Partition file: one integer label per line, in node order.
    #[arg(long)]
    partition: PathBuf,
    /// Destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SbmCommand {
    /// Sample a graph from a block-model spec file.
    Sample(SbmSampleArgs),
    /// Print the reduced modularity matrix and its spectrum.
    Reduce(SbmReduceArgs),
}

#[derive(Args, Debug)]
struct SbmSampleArgs {
    /// Block-model spec file (`sizes:` line plus connectivity rows).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Index base for the written edge list (0 or 1).
    #[arg(long, default_value = "1")]
    base: String,
    /// Edge-list destination.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SbmReduceArgs {
    /// Block-model spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Use the measure-normalized reduced form instead of the raw one.
    #[arg(long)]
    normalized: bool,
    /// Destination (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Instances per suite (seed count for block-recovery).
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Parses argv and runs the requested command, returning the process exit
/// code. Never panics on user input.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Render through the print macros so test harnesses can
            // capture the text and the bytes stay terminal-independent.
            let rendered = e.render();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{rendered}");
                    0
                }
                _ => {
                    eprint!("{rendered}");
                    1
                }
            };
        }
    };
    init_thread_pool();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            classify(&err)
        }
    }
}

/// Maps an error chain to the documented exit codes.
fn classify(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 1;
        }
        if let Some(core) = cause.downcast_ref::<antimod_core::Error>() {
            return if core.is_numerical() { 3 } else { 2 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    2
}

/// Applies ANTIMOD_THREADS to the global rayon pool. A failure to rebuild
/// an already-initialized pool is ignored (repeated in-process calls).
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("ANTIMOD_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring ANTIMOD_THREADS={raw:?} (want a positive integer)"),
        }
    }
}

fn execute(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Detect(args) => run_detect(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Angles(args) => run_angles(args),
        Command::Sbm(SbmCommand::Sample(args)) => run_sbm_sample(args),
        Command::Sbm(SbmCommand::Reduce(args)) => run_sbm_reduce(args),
        Command::Validate(args) => run_validate(args),
    }
}

fn parse_base(raw: &str) -> anyhow::Result<IndexBase> {
    raw.parse::<IndexBase>()
        .map_err(|_| usage(format!("--base must be 0 or 1, got {raw:?}")))
}

fn load_graph(args: &InputArgs) -> anyhow::Result<Graph> {
    let format = match args.format.as_str() {
        "auto" => {
            let ext = args
                .input
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.to_ascii_lowercase());
            match ext.as_deref() {
                Some("mtx") | Some("mm") => "mtx",
                _ => "edges",
            }
        }
        "edges" => "edges",
        "mtx" => "mtx",
        other => return Err(usage(format!("unknown --format {other:?}"))),
    };
    match format {
        "mtx" => parse_matrix_market(&args.input, args.binarize)
            .with_context(|| format!("reading {}", args.input.display())),
        _ => {
            if args.binarize {
                return Err(usage("--binarize applies to MatrixMarket input only"));
            }
            let base = parse_base(&args.base)?;
            parse_edge_list(&args.input, base)
                .with_context(|| format!("reading {}", args.input.display()))
        }
    }
}

fn parse_measure(raw: &str, g: &Graph) -> anyhow::Result<MeasurePolicy> {
    match raw {
        "unit" => Ok(MeasurePolicy::Unit),
        "degree" => Ok(MeasurePolicy::Degree),
        "offset" => Ok(MeasurePolicy::offset_with_average_degree(g)),
        other => {
            if let Some(inner) = other
                .strip_prefix("offset(")
                .and_then(|s| s.strip_suffix(')'))
            {
                let tau: f64 = inner
                    .parse()
                    .map_err(|_| usage(format!("bad offset value {inner:?} in --measure")))?;
                if !(tau > 0.0) {
                    return Err(usage(format!("--measure offset needs tau > 0, got {tau}")));
                }
                Ok(MeasurePolicy::Offset(tau))
            } else {
                Err(usage(format!(
                    "unknown --measure {other:?} (want unit, degree, offset, or offset(<tau>))"
                )))
            }
        }
    }
}

fn parse_k(raw: &str) -> anyhow::Result<KSelection> {
    if raw == "auto" {
        return Ok(KSelection::Auto);
    }
    let k: usize = raw
        .parse()
        .map_err(|_| usage(format!("--k must be `auto` or a positive integer, got {raw:?}")))?;
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    Ok(KSelection::Explicit(k))
}

fn parse_clusters(raw: &str) -> anyhow::Result<ClustersMode> {
    match raw {
        "k_plus_one" => Ok(ClustersMode::KPlusOne),
        "k" => Ok(ClustersMode::K),
        other => Err(usage(format!(
            "unknown --clusters {other:?} (want k_plus_one or k)"
        ))),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Into::into),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_detect(args: DetectArgs) -> anyhow::Result<i32> {
    let g = load_graph(&args.input)?;
    let cfg = DetectionConfig {
        measure: parse_measure(&args.measure.measure, &g)?,
        k: parse_k(&args.k)?,
        max_k: args.max_k,
        ratio_threshold: args.ratio_threshold,
        clusters: parse_clusters(&args.clusters)?,
        scale_rows: !args.no_scale_rows,
        seed: args.seed,
        restarts: args.restarts,
        tol: args.tol,
    };
    cfg.validate()?;
    let report = detect(&g, &cfg)?;
    emit(args.output.as_deref(), &report_json_string(&report))?;
    if let Some(csv) = &args.spectrum {
        emit(Some(csv), &spectrum_csv_string(&report.eigenvalues, &report.ratios))?;
    }
    Ok(0)
}

fn run_spectrum(args: SpectrumArgs) -> anyhow::Result<i32> {
    let g = load_graph(&args.input)?;
    let policy = parse_measure(&args.measure.measure, &g)?;
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let m = args.count.min(g.n());
    let op = ModularityOperator::new(&g, policy)?;
    let spectrum = dominant_eigenpairs(&op, m, args.tol, args.seed)?;
    let ratios = if spectrum.lambdas.len() >= 2 {
        spectrum_ratios(&spectrum.lambdas, spectrum.lambdas.len() - 1, args.tol)?
    } else {
        Vec::new()
    };
    emit(
        args.output.as_deref(),
        &spectrum_csv_string(&spectrum.lambdas, &ratios),
    )?;
    Ok(0)
}

fn run_angles(args: AnglesArgs) -> anyhow::Result<i32> {
    let g = load_graph(&args.input)?;
    let policy = parse_measure(&args.measure.measure, &g)?;
    let raw_labels = parse_partition_labels(&args.partition)
        .with_context(|| format!("reading {}", args.partition.display()))?;
    if raw_labels.len() != g.n() {
        return Err(anyhow!(
            "partition file has {} labels but the graph has {} nodes",
            raw_labels.len(),
            g.n()
        ));
    }
    // Compact sparse label values so no part is empty.
    let mut distinct: Vec<usize> = raw_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label present"))
        .collect();
    let partition = Partition::from_labels(&labels);
    let parts = partition.parts();
    let frame = OrthonormalFrame::from_measure_vectors(&g, &parts, policy)?;
    let op = ModularityOperator::new(&g, policy)?;
    let h = project_H(&op, &frame)?;
    let k = project_K(&op, &frame)?;
    let sigma = sigma_score(&g, &partition, policy)?;

    let mut out = String::new();
    writeln!(out, "cos_h={}", h.cosine).unwrap();
    writeln!(out, "sin_h={}", h.sine).unwrap();
    writeln!(out, "cos_k={}", k.cosine).unwrap();
    writeln!(out, "sin_k={}", k.sine).unwrap();
    writeln!(out, "sigma={sigma}").unwrap();
    emit(args.output.as_deref(), &out)?;
    Ok(0)
}

fn run_sbm_sample(args: SbmSampleArgs) -> anyhow::Result<i32> {
    let spec = parse_sbm_spec(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let base = parse_base(&args.base)?;
    let g = sample(&spec, args.seed)?;
    write_edge_list(&args.output, &g, base)
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(0)
}

fn run_sbm_reduce(args: SbmReduceArgs) -> anyhow::Result<i32> {
    let spec = parse_sbm_spec(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let averages = reduced_modularity(&spec, args.normalized)?;
    let matrix = if args.normalized {
        averages.reduced_normalized.clone().ok_or_else(|| {
            anyhow!("normalized reduced form undefined: some block has zero average degree")
        })?
    } else {
        averages.reduced.clone()
    };
    let eig = full_symmetric_eig(&matrix)?;
    let rows: Vec<Vec<f64>> = (0..matrix.nrows())
        .map(|i| (0..matrix.ncols()).map(|j| matrix[(i, j)]).collect())
        .collect();
    let value = serde_json::json!({
        "k": spec.k(),
        "n": spec.n(),
        "sizes": spec.sizes(),
        "average_weight_mode": spec.is_average_weight(),
        "normalized": args.normalized,
        "delta": averages.delta,
        "nu": averages.nu,
        "matrix": rows,
        "eigenvalues": eig.lambdas,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("reduce serialization");
    text.push('\n');
    emit(args.output.as_deref(), &text)?;
    Ok(0)
}

fn run_validate(args: ValidateArgs) -> anyhow::Result<i32> {
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let outcomes: Vec<SuiteOutcome> = if args.suite == "all" {
        all_suites(args.trials, args.seed)
    } else {
        match suite_by_name(&args.suite, args.trials, args.seed) {
            Some(o) => vec![o],
            None => {
                return Err(usage(format!(
                    "unknown --suite {:?} (want all or one of: {})",
                    args.suite,
                    SUITE_NAMES.join(", ")
                )))
            }
        }
    };
    let mut all_pass = true;
    for outcome in &outcomes {
        println!("{}", outcome.summary_line());
        if !outcome.pass {
            all_pass = false;
            eprintln!("  {}", outcome.detail);
        } else if outcome.advisory > 0 {
            eprintln!("  {}", outcome.detail);
        }
    }
    Ok(if all_pass { 0 } else { 3 })
}
