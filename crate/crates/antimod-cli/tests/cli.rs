//! End-to-end runs of the `antimod` command tree through `run_cli`.

use std::fs;
use std::path::Path;

use antimod_cli::run_cli;
use antimod_core::detect::adjusted_rand_index;
use antimod_core::io::read_report;

fn run(args: &[&str]) -> i32 {
    run_cli(std::iter::once("antimod").chain(args.iter().copied()))
}

fn write_two_block_spec(path: &Path) {
    fs::write(path, "sizes: 100 100\n0.9 0.05\n0.05 0.9\n").unwrap();
}

#[test]
fn block_model_flow_recovers_planted_partition() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("two.spec");
    let edges = dir.path().join("g.edges");
    let report_path = dir.path().join("report.json");
    write_two_block_spec(&spec);

    assert_eq!(
        run(&[
            "sbm",
            "sample",
            "--spec",
            spec.to_str().unwrap(),
            "--seed",
            "3",
            "--output",
            edges.to_str().unwrap(),
        ]),
        0
    );
    assert_eq!(
        run(&[
            "detect",
            "--input",
            edges.to_str().unwrap(),
            "--k",
            "1",
            "--output",
            report_path.to_str().unwrap(),
        ]),
        0
    );

    let report = read_report(&report_path).unwrap();
    assert_eq!(report.meta.n, 200);
    assert_eq!(report.meta.k_selected, 1);
    assert_eq!(report.clusters.len(), 2);

    let mut found = vec![usize::MAX; report.meta.n];
    for cluster in &report.clusters {
        for &node in &cluster.members {
            found[node] = cluster.id;
        }
    }
    assert!(found.iter().all(|&l| l != usize::MAX), "report must cover all nodes");

    let planted: Vec<usize> = (0..200).map(|i| usize::from(i >= 100)).collect();
    let ari = adjusted_rand_index(&planted, &found).unwrap();
    assert!(
        (ari - 1.0).abs() < 1e-12,
        "planted two-block split should be recovered exactly, ARI = {ari}"
    );
}

#[test]
fn detect_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("two.spec");
    let edges = dir.path().join("g.edges");
    write_two_block_spec(&spec);
    assert_eq!(
        run(&[
            "sbm",
            "sample",
            "--spec",
            spec.to_str().unwrap(),
            "--seed",
            "9",
            "--output",
            edges.to_str().unwrap(),
        ]),
        0
    );

    let mut outputs = Vec::new();
    for round in 0..2 {
        let report_path = dir.path().join(format!("report{round}.json"));
        let csv_path = dir.path().join(format!("spectrum{round}.csv"));
        assert_eq!(
            run(&[
                "detect",
                "--input",
                edges.to_str().unwrap(),
                "--measure",
                "degree",
                "--seed",
                "11",
                "--output",
                report_path.to_str().unwrap(),
                "--spectrum",
                csv_path.to_str().unwrap(),
            ]),
            0
        );
        outputs.push((fs::read(&report_path).unwrap(), fs::read(&csv_path).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "report bytes must be identical");
    assert_eq!(outputs[0].1, outputs[1].1, "spectrum bytes must be identical");
    assert!(!outputs[0].0.is_empty() && !outputs[0].1.is_empty());
}

#[test]
fn matrix_market_input_with_binarize() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("tri.mtx");
    // Weighted triangle plus a pendant vertex.
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real symmetric\n\
         4 4 4\n\
         2 1 5.0\n\
         3 1 2.5\n\
         3 2 0.5\n\
         4 3 4.0\n",
    )
    .unwrap();
    let report_path = dir.path().join("report.json");
    assert_eq!(
        run(&[
            "detect",
            "--input",
            mtx.to_str().unwrap(),
            "--binarize",
            "--k",
            "1",
            "--output",
            report_path.to_str().unwrap(),
        ]),
        0
    );
    let report = read_report(&report_path).unwrap();
    assert_eq!(report.meta.n, 4);
    assert_eq!(report.meta.m, 4);
    // Binarized volume = 2m = 8; the leading eigenvalue is bounded by it.
    assert!(report.eigenvalues[0].abs() <= 8.0);
}

#[test]
fn angles_match_complete_bipartite_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("k22.edges");
    let labels = dir.path().join("sides.labels");
    let out = dir.path().join("angles.txt");
    // K_{2,2} with unit weights, 1-based endpoints.
    fs::write(&edges, "1 3 1\n1 4 1\n2 3 1\n2 4 1\n").unwrap();
    fs::write(&labels, "0\n0\n1\n1\n").unwrap();

    assert_eq!(
        run(&[
            "angles",
            "--input",
            edges.to_str().unwrap(),
            "--partition",
            labels.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]),
        0
    );

    let text = fs::read_to_string(&out).unwrap();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("missing {key} in {text:?}"))
            .parse()
            .unwrap()
    };
    // M = -0.5*s*s^T with s = (1,1,-1,-1): the side frame captures the
    // diagonal blocks only for H, the whole matrix for K.
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    assert!((value("cos_h") - inv_sqrt2).abs() < 1e-12);
    assert!((value("sin_h") - inv_sqrt2).abs() < 1e-12);
    assert!((value("cos_k") - 1.0).abs() < 1e-12);
    assert!(value("sin_k").abs() < 1e-12);
    assert!((value("sigma") - 2.0).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("tiny.edges");
    fs::write(&edges, "1 2 1\n").unwrap();
    let edges = edges.to_str().unwrap();

    // Usage errors -> 1.
    assert_eq!(run(&["detect", "--input", edges, "--no-such-flag"]), 1);
    assert_eq!(run(&["detect", "--input", edges, "--binarize"]), 1);
    assert_eq!(run(&["detect", "--input", edges, "--measure", "parabolic"]), 1);
    assert_eq!(run(&["detect", "--input", edges, "--measure", "offset(-2)"]), 1);
    assert_eq!(run(&["detect", "--input", edges, "--k", "0"]), 1);
    assert_eq!(run(&["validate", "--suite", "no-such-suite"]), 1);

    // Data errors -> 2.
    assert_eq!(
        run(&["detect", "--input", dir.path().join("absent.edges").to_str().unwrap()]),
        2
    );
    let garbled = dir.path().join("garbled.edges");
    fs::write(&garbled, "1 huh 3\n").unwrap();
    assert_eq!(run(&["detect", "--input", garbled.to_str().unwrap()]), 2);

    // Help and version -> 0.
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["--version"]), 0);
    assert_eq!(run(&["detect", "--help"]), 0);

    // A passing certification suite -> 0.
    assert_eq!(
        run(&["validate", "--suite", "modularity-identities", "--trials", "5", "--seed", "2"]),
        0
    );
}

#[test]
fn spectrum_subcommand_agrees_with_detect_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("two.spec");
    let edges = dir.path().join("g.edges");
    write_two_block_spec(&spec);
    assert_eq!(
        run(&[
            "sbm",
            "sample",
            "--spec",
            spec.to_str().unwrap(),
            "--seed",
            "5",
            "--output",
            edges.to_str().unwrap(),
        ]),
        0
    );

    let from_detect = dir.path().join("detect.csv");
    let from_spectrum = dir.path().join("spectrum.csv");
    assert_eq!(
        run(&[
            "detect",
            "--input",
            edges.to_str().unwrap(),
            "--output",
            dir.path().join("r.json").to_str().unwrap(),
            "--spectrum",
            from_detect.to_str().unwrap(),
        ]),
        0
    );
    assert_eq!(
        run(&[
            "spectrum",
            "--input",
            edges.to_str().unwrap(),
            "--output",
            from_spectrum.to_str().unwrap(),
        ]),
        0
    );

    // Both defaults compute max_k + 1 = 21 eigenvalues with ratios over
    // the first 20, from the same seed; the CSVs must agree exactly.
    let a = fs::read_to_string(&from_detect).unwrap();
    let b = fs::read_to_string(&from_spectrum).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sbm_reduce_reports_exact_two_block_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("two.spec");
    let out = dir.path().join("reduce.json");
    write_two_block_spec(&spec);
    assert_eq!(
        run(&[
            "sbm",
            "reduce",
            "--spec",
            spec.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]),
        0
    );
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(value["k"], 2);
    assert_eq!(value["n"], 200);
    let eigs: Vec<f64> = value["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(eigs.len(), 2);
    // Exact closed form: nonzero eigenvalue n(p - q)/2 = 100*0.85 = 85.
    assert!((eigs[0] - 85.0).abs() < 1e-9, "leading eigenvalue {}", eigs[0]);
    assert!(eigs[1].abs() < 1e-9);
}
