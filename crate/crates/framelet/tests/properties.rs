//! Randomized invariants: reconstruction and energy preservation on
//! arbitrary small chains, tightness of every constructible bank, Haar
//! sparsity, and byte-stable serialization round trips.

use framelet::io;
use framelet::{
    build_chain, check_tightness, decompose, fast_dft, honbc, preset_filter_bank, reconstruct,
    Graph, PresetOptions,
};
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(0.2..1.2)));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.push((u.min(v), u.max(v), rng.random_range(0.2..1.2)));
        }
    }
    Graph::build(n, &edges).expect("random graph builds")
}

/// Two coarsenings sized so every level ratio stays above two, which every
/// bank construction in the suite accepts.
fn small_chain(n: usize, seed: u64) -> framelet::Chain {
    let k1 = (n * 2 / 5).max(2);
    let k2 = (k1 * 2 / 5).max(1);
    let g = random_connected(n, n, seed);
    build_chain(&g, &[k1, k2], seed ^ 0x9e37, None).expect("chain builds")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_chain_reconstructs_any_signal(
        n in 12usize..40,
        seed in any::<u64>(),
        n_high in 1usize..4,
        j1 in 0usize..2,
    ) {
        let chain = small_chain(n, seed);
        let basis = honbc(&chain).unwrap();
        let fb = preset_filter_bank(&chain.sizes(), n_high, &PresetOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let co = decompose(&fb, &basis, &f, j1).unwrap();
        let back = reconstruct(&fb, &basis, &co).unwrap();
        for (a, b) in back.iter().zip(&f) {
            prop_assert!((a - b).abs() <= 1e-9, "reconstruction off by {}", (a - b).abs());
        }
    }

    #[test]
    fn every_preset_bank_is_tight(
        n in 12usize..60,
        seed in any::<u64>(),
        n_high in 1usize..4,
    ) {
        let chain = small_chain(n, seed);
        let fb = preset_filter_bank(&chain.sizes(), n_high, &PresetOptions::default()).unwrap();
        prop_assert!(check_tightness(&fb).max() <= 1e-12);
    }

    #[test]
    fn haar_transform_preserves_energy(n in 12usize..40, seed in any::<u64>()) {
        let chain = small_chain(n, seed);
        let basis = honbc(&chain).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = fast_dft(&basis, &f).unwrap();
        let fe: f64 = f.iter().map(|x| x * x).sum();
        let ce: f64 = c.iter().map(|x| x * x).sum();
        prop_assert!((fe - ce).abs() <= 1e-10 * fe.max(1.0));
    }

    #[test]
    fn haar_vectors_take_at_most_two_distinct_nonzero_values(
        n in 12usize..40,
        seed in any::<u64>(),
    ) {
        let chain = small_chain(n, seed);
        let basis = honbc(&chain).unwrap();
        prop_assert!(basis.spoc_counts().iter().all(|&s| s <= 2));
    }
}

// ==== serialization round trips =============================================

fn arb_edges(n: usize) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec(
        (0usize..n, 0usize..n, 0.001f64..100.0),
        1..(2 * n),
    )
    .prop_map(move |raw| {
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        for (a, b, w) in raw {
            let (u, v) = (a.min(b), a.max(b));
            if seen.insert((u, v)) {
                edges.push((u, v, w));
            }
        }
        edges
    })
    .prop_filter("at least one edge", |e| !e.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graph_tsv_round_trips_byte_identically(edges in arb_edges(12)) {
        let g = Graph::build(12, &edges).unwrap();
        let text = io::serialize_graph_tsv(&g);
        let back = io::parse_graph_tsv(&text).unwrap();
        prop_assert_eq!(io::serialize_graph_tsv(&back), text);
    }

    #[test]
    fn graph_json_round_trips_byte_identically(edges in arb_edges(12)) {
        let g = Graph::build(12, &edges).unwrap();
        let text = io::serialize_graph_json(&g);
        let back = io::parse_graph_json(&text).unwrap();
        prop_assert_eq!(io::serialize_graph_json(&back), text);
    }

    #[test]
    fn signal_csv_round_trips_byte_identically(
        values in prop::collection::vec(-1e6f64..1e6, 1..64),
    ) {
        let text = io::serialize_signal_csv(&values);
        let back = io::parse_signal_csv(&text).unwrap();
        prop_assert_eq!(&back, &values);
        prop_assert_eq!(io::serialize_signal_csv(&back), text);
    }

    #[test]
    fn matrix_blocks_round_trip_and_reject_corruption(
        data in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..64),
        flip in any::<prop::sample::Index>(),
    ) {
        let rows = data.len();
        let bytes = io::encode_matrix(rows, 1, &data).unwrap();
        let (r, c, back) = io::decode_matrix(&bytes).unwrap();
        prop_assert_eq!((r, c), (rows, 1));
        for (a, b) in back.iter().zip(&data) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        // Truncation is always detected.
        let cut = flip.index(bytes.len().saturating_sub(1)).max(1);
        prop_assert!(io::decode_matrix(&bytes[..cut]).is_err());
    }

    #[test]
    fn parsers_never_panic_on_arbitrary_text(text in "\\PC*") {
        let _ = io::parse_graph_tsv(&text);
        let _ = io::parse_signal_csv(&text);
        let _ = io::parse_graph_json(&text);
        let _ = io::bundle_from_json(&text);
    }

    #[test]
    fn decoder_never_panics_on_arbitrary_bytes(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = io::decode_matrix(&bytes);
    }
}
