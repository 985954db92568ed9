//! End-to-end tests of the `framelet` binary: every subcommand, the file
//! formats it reads and writes, and the exit-code contract (0 success,
//! 1 validation failure, 2 I/O or parse failure).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_framelet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

// ==== fixtures ==============================================================

/// The six-vertex worked example as a TSV edge list.
const TOY_TSV: &str = "0\t1\t1\n0\t2\t1\n1\t2\t1\n1\t3\t1\n3\t4\t1\n3\t5\t1\n4\t5\t1\n";

const ONES_CSV: &str = "node,value\n0,1\n1,1\n2,1\n3,1\n4,1\n5,1\n";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        std::fs::write(dir.path().join("toy.tsv"), TOY_TSV).unwrap();
        std::fs::write(dir.path().join("ones.csv"), ONES_CSV).unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    /// Builds chain.json and basis.json for the toy graph with the fixed
    /// medoid centers, so downstream subcommands have their inputs.
    fn with_basis(self) -> Self {
        let out = run(&[
            "chain",
            "--graph",
            &self.arg("toy.tsv"),
            "--sizes",
            "3,2,1",
            "--toy-centers",
            "--out",
            &self.arg("chain.json"),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let out = run(&[
            "basis",
            "--chain",
            &self.arg("chain.json"),
            "--kind",
            "haar",
            "--out",
            &self.arg("basis.json"),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        self
    }
}

fn read_signal(path: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

/// Value column of the three-column block CSVs written by `mra`.
fn read_block(path: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect()
}

// ==== chain =================================================================

#[test]
fn chain_builds_and_reports_level_sizes() {
    let fx = Fixture::new();
    let out = run(&[
        "chain",
        "--graph",
        &fx.arg("toy.tsv"),
        "--sizes",
        "3,2,1",
        "--toy-centers",
        "--out",
        &fx.arg("chain.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("6, 3, 2, 1"));
    assert!(fx.path("chain.json").exists());
}

#[test]
fn chain_missing_graph_file_exits_2() {
    let fx = Fixture::new();
    let out = run(&[
        "chain",
        "--graph",
        &fx.arg("nope.tsv"),
        "--sizes",
        "3,2,1",
        "--out",
        &fx.arg("chain.json"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn chain_oversized_level_exits_1() {
    let fx = Fixture::new();
    let out = run(&[
        "chain",
        "--graph",
        &fx.arg("toy.tsv"),
        "--sizes",
        "10,2,1",
        "--out",
        &fx.arg("chain.json"),
    ]);
    assert_eq!(code(&out), 1);
}

// ==== basis =================================================================

#[test]
fn basis_haar_verifies_and_reports_spoc() {
    let fx = Fixture::new().with_basis();
    let out = run(&["basis", "--chain", &fx.arg("chain.json"), "--kind", "haar"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("max spoc: 2"));
}

#[test]
fn basis_laplacian_verifies() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "basis",
        "--chain",
        &fx.arg("chain.json"),
        "--kind",
        "laplacian",
        "--out",
        &fx.arg("onbc.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(!stdout(&out).contains("max spoc"), "spoc is Haar-only");
}

#[test]
fn basis_corrupt_chain_file_exits_2() {
    let fx = Fixture::new();
    std::fs::write(fx.path("bad.json"), "not json at all").unwrap();
    let out = run(&["basis", "--chain", &fx.arg("bad.json"), "--kind", "haar"]);
    assert_eq!(code(&out), 2);
}

// ==== transform =============================================================

#[test]
fn constant_signal_decomposes_to_pure_approximation() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "transform",
        "decompose",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:2high",
        "--signal",
        &fx.arg("ones.csv"),
        "--J1",
        "0",
        "--verify",
        "--out",
        &fx.arg("co.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("coefficient energy: 6.000000"), "{text}");
    assert!(text.contains("dense oracle deviation"), "{text}");

    // All detail blocks of a constant signal are zero; the single
    // approximation coefficient carries the whole energy.
    let payload = std::fs::read_to_string(fx.path("co.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&payload).unwrap();
    for block in doc["coefficients"]["blocks"].as_array().unwrap() {
        let values: Vec<f64> = block["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        if block["name"] == "low" {
            assert!((values[0].abs() - 6f64.sqrt()).abs() < 1e-10);
        } else {
            for v in values {
                assert!(v.abs() < 1e-10, "detail coefficient {v} not negligible");
            }
        }
    }
}

#[test]
fn decompose_then_reconstruct_round_trips_the_signal() {
    let fx = Fixture::new().with_basis();
    // A signal with structure at every scale.
    let signal = "node,value\n0,1\n1,-2\n2,0.5\n3,3\n4,-1\n5,0.25\n";
    std::fs::write(fx.path("f.csv"), signal).unwrap();
    // The shallow four-level chain needs the wider generator window.
    for filter in ["preset:1high", "preset:3high", "generator:r2"] {
        let out = run(&[
            "transform",
            "decompose",
            "--basis",
            &fx.arg("basis.json"),
            "--filter",
            filter,
            "--eps",
            "0.75",
            "--signal",
            &fx.arg("f.csv"),
            "--J1",
            "1",
            "--out",
            &fx.arg("co.json"),
        ]);
        assert_eq!(code(&out), 0, "{filter}: {}", stderr(&out));
        let out = run(&[
            "transform",
            "reconstruct",
            "--basis",
            &fx.arg("basis.json"),
            "--filter",
            filter,
            "--eps",
            "0.75",
            "--coefficients",
            &fx.arg("co.json"),
            "--verify",
            "--out",
            &fx.arg("back.csv"),
        ]);
        assert_eq!(code(&out), 0, "{filter}: {}", stderr(&out));
        let want = [1.0, -2.0, 0.5, 3.0, -1.0, 0.25];
        let got = read_signal(&fx.path("back.csv"));
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{filter}: {g} vs {w}");
        }
    }
}

#[test]
fn binary_sidecar_coefficients_round_trip() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "transform",
        "decompose",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:2high",
        "--signal",
        &fx.arg("ones.csv"),
        "--binary",
        "--out",
        &fx.arg("co.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(fx.path("co.bin").exists(), "sidecar written next to bundle");
    let out = run(&[
        "transform",
        "reconstruct",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:2high",
        "--coefficients",
        &fx.arg("co.json"),
        "--out",
        &fx.arg("back.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for v in read_signal(&fx.path("back.csv")) {
        assert!((v - 1.0).abs() < 1e-9);
    }
}

#[test]
fn wrong_length_signal_exits_1() {
    let fx = Fixture::new().with_basis();
    std::fs::write(fx.path("short.csv"), "node,value\n0,1\n1,2\n").unwrap();
    let out = run(&[
        "transform",
        "decompose",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:1high",
        "--signal",
        &fx.arg("short.csv"),
        "--out",
        &fx.arg("co.json"),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_signal_file_exits_2() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "transform",
        "decompose",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:1high",
        "--signal",
        &fx.arg("nope.csv"),
        "--out",
        &fx.arg("co.json"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_filter_spec_exits_2() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "transform",
        "decompose",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:9high",
        "--signal",
        &fx.arg("ones.csv"),
        "--out",
        &fx.arg("co.json"),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("preset"));
}

// ==== verify ================================================================

#[test]
fn verify_passes_on_a_good_basis_and_filter() {
    let fx = Fixture::new().with_basis();
    let out = run(&[
        "verify",
        "--basis",
        &fx.arg("basis.json"),
        "--filter",
        "preset:3high",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("all checks passed"), "{text}");
    assert!(text.contains("filter tightness deviation"), "{text}");
    assert!(text.contains("quadrature deviation"), "{text}");
}

// ==== bench =================================================================

#[test]
fn bench_writes_csv_and_fits_a_slope() {
    let fx = Fixture::new();
    let out = run(&[
        "bench",
        "--sizes",
        "120,240",
        "--seed",
        "7",
        "--out",
        &fx.arg("bench.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("log-log slope (operation counts):"), "{text}");
    assert!(!text.contains("n/a"), "two sizes fit a real slope: {text}");
    let csv = std::fs::read_to_string(fx.path("bench.csv")).unwrap();
    assert!(csv.starts_with("N,adds,muls,seconds\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn bench_single_size_reports_no_slope() {
    let out = run(&["bench", "--sizes", "120"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("log-log slope (operation counts): n/a"));
}

#[test]
fn bench_unordered_sizes_exit_2() {
    let out = run(&["bench", "--sizes", "240,120"]);
    assert_eq!(code(&out), 2);
}

// ==== demo-toy ==============================================================

#[test]
fn toy_demo_passes_every_golden_check() {
    let out = run(&["demo-toy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("0 failed"), "{text}");
    // The one documented disagreement with the hand-written table.
    assert!(text.contains("1/sqrt(6)"), "{text}");
}

// ==== mra ===================================================================

#[test]
fn mra_emits_every_block_and_the_cluster_map() {
    let fx = Fixture::new();
    let out = run(&[
        "mra",
        "--graph",
        &fx.arg("toy.tsv"),
        "--signal",
        &fx.arg("ones.csv"),
        "--sizes",
        "3,2,1",
        "--filter",
        "preset:2high",
        "--J1",
        "0",
        "--out-dir",
        &fx.arg("out"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // One approximation block at the coarsest level plus r blocks per
    // transition; block lengths follow the level sizes 1, 2, 3.
    let approx = read_block(&fx.path("out/approx-level0.csv"));
    assert_eq!(approx.len(), 1);
    assert!((approx[0].abs() - 6f64.sqrt()).abs() < 1e-10);
    for (level, len) in [(1usize, 2usize), (2, 3), (3, 6)] {
        for fam in 0..2 {
            let block = read_block(&fx.path(&format!("out/detail-level{level}-fam{fam}.csv")));
            assert_eq!(block.len(), len, "detail-level{level}-fam{fam}");
            for v in &block {
                assert!(v.abs() < 1e-10, "constant signal has zero details");
            }
        }
    }

    let map = std::fs::read_to_string(fx.path("out/clusters.csv")).unwrap();
    assert!(map.starts_with("vertex,level,cluster\n"));
    // 6 vertices times 4 levels, plus the header.
    assert_eq!(map.lines().count(), 25);
}

// ==== format stability ======================================================

#[test]
fn bundles_round_trip_byte_identically_through_the_binary() {
    let fx = Fixture::new().with_basis();
    // Re-running chain with identical inputs reproduces the bundle bytes.
    let first = std::fs::read(fx.path("chain.json")).unwrap();
    let out = run(&[
        "chain",
        "--graph",
        &fx.arg("toy.tsv"),
        "--sizes",
        "3,2,1",
        "--toy-centers",
        "--out",
        &fx.arg("chain2.json"),
    ]);
    assert_eq!(code(&out), 0);
    let second = std::fs::read(fx.path("chain2.json")).unwrap();
    assert_eq!(first, second);
}
