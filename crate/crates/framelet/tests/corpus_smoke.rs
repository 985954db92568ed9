//! Drives every checked-in fuzz corpus seed through the same entry points
//! the fuzz targets hit, on the stable toolchain. Catches regressions in
//! the corpus itself and keeps the parser paths exercised even where the
//! fuzzer can't run.

use framelet::io;
use std::path::PathBuf;

fn corpus(name: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(name);
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())) {
        let path = entry.unwrap().path();
        if path.is_file() {
            let bytes = std::fs::read(&path).unwrap();
            out.push((path, bytes));
        }
    }
    assert!(!out.is_empty(), "empty corpus {name}");
    out.sort();
    out
}

#[test]
fn graph_tsv_seeds_never_panic() {
    for (_, bytes) in corpus("graph_tsv") {
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = io::parse_graph_tsv(text);
        }
    }
}

#[test]
fn graph_json_seeds_never_panic() {
    for (_, bytes) in corpus("graph_json") {
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = io::parse_graph_json(text);
        }
    }
}

#[test]
fn signal_csv_seeds_never_panic() {
    for (_, bytes) in corpus("signal_csv") {
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = io::parse_signal_csv(text);
        }
    }
}

#[test]
fn matrix_block_seeds_never_panic() {
    for (_, bytes) in corpus("matrix_block") {
        let _ = io::decode_matrix(&bytes);
    }
}

#[test]
fn bundle_json_seeds_never_panic() {
    for (_, bytes) in corpus("bundle_json") {
        let Ok(text) = std::str::from_utf8(&bytes) else {
            continue;
        };
        let Ok(bundle) = io::bundle_from_json(text) else {
            continue;
        };
        if let Some(m) = &bundle.chain {
            let _ = io::chain_from_manifest(m);
        }
        let _ = io::basis_from_bundle(&bundle);
        if let Some(p) = &bundle.filter_bank {
            let _ = io::filter_bank_from_payload(p);
        }
        if let Some(p) = &bundle.coefficients {
            let _ = io::coefficients_from_payload(p, None);
        }
    }
}

/// The live seeds (produced by the pipeline itself) must still parse
/// cleanly, not just fail to crash.
#[test]
fn pipeline_seeds_still_parse() {
    let toy = corpus("graph_tsv")
        .into_iter()
        .find(|(p, _)| p.file_name().unwrap() == "toy.tsv")
        .expect("toy seed present");
    let g = io::parse_graph_tsv(std::str::from_utf8(&toy.1).unwrap()).unwrap();
    assert_eq!(g.n(), 6);

    let chain = corpus("bundle_json")
        .into_iter()
        .find(|(p, _)| p.file_name().unwrap() == "chain.json")
        .expect("chain seed present");
    let bundle = io::bundle_from_json(std::str::from_utf8(&chain.1).unwrap()).unwrap();
    let chain = io::chain_from_manifest(bundle.chain.as_ref().unwrap()).unwrap();
    assert_eq!(chain.sizes(), vec![1, 2, 3, 6]);
}
