//! Worked six-vertex reference example.
//!
//! A small graph whose chain, basis, generator tables, and framelet tables
//! were derived by hand and cross-checked numerically. Tests use this module
//! as frozen golden data; the demo subcommand prints it.
//!
//! Vertices are named a..f (ids 0..5). All edges have weight 1:
//! a-b, a-c, c-d, c-e, c-f, d-e. The chain has level sizes 6/3/2/1 with
//! clusters {a,b} {c,d,e} {f} at size 3 and {a,b} {c,d,e,f} at size 2.

use crate::chain::{build_chain, Chain};
use crate::graph::Graph;

/// The six-vertex graph with labels a..f.
pub fn graph() -> Graph {
    Graph::build(
        6,
        &[
            (0, 1, 1.0),
            (0, 2, 1.0),
            (2, 3, 1.0),
            (2, 4, 1.0),
            (2, 5, 1.0),
            (3, 4, 1.0),
        ],
    )
    .unwrap()
    .with_labels(vec![
        "a".into(),
        "b".into(),
        "c".into(),
        "d".into(),
        "e".into(),
        "f".into(),
    ])
    .unwrap()
}

/// Medoid seeds reproducing the reference clustering: vertices {a, c, f} at
/// the first coarsening, then nodes {0, 1} of the 3-node level, then node 0.
pub fn centers() -> Vec<Vec<usize>> {
    vec![vec![0, 2, 5], vec![0, 1], vec![0]]
}

/// The reference chain with level sizes 1/2/3/6 (coarsest first).
pub fn chain() -> Chain {
    build_chain(&graph(), &[3, 2, 1], 0, Some(&centers())).unwrap()
}

/// Quadrature weights per level, coarsest first: cluster cardinalities.
pub fn quadrature_weights() -> Vec<Vec<f64>> {
    vec![
        vec![6.0],
        vec![2.0, 4.0],
        vec![2.0, 3.0, 1.0],
        vec![1.0; 6],
    ]
}

/// The six hand-checked orthonormal basis vectors, rows u1..u6 over vertices
/// a..f, with the signs as originally tabulated. Constructions are compared
/// to these up to a per-vector sign.
pub fn golden_basis() -> [[f64; 6]; 6] {
    let s6 = 6f64.sqrt();
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    [
        [1.0 / s6; 6],
        [
            2.0 / (2.0 * s3),
            2.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
        ],
        [
            0.0,
            0.0,
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            3.0 / (2.0 * s3),
        ],
        [0.0, 0.0, 2.0 / s6, -1.0 / s6, -1.0 / s6, 0.0],
        [0.0, 0.0, 0.0, 1.0 / s2, -1.0 / s2, 0.0],
        [1.0 / s2, -1.0 / s2, 0.0, 0.0, 0.0, 0.0],
    ]
}

/// Hand-picked tight generator samples on the index grid 1..=6.
///
/// `low[j][l-1]` is the low-pass generator value at level j and index l;
/// `high[j]` lists the high-pass families at level j. Level 3 is identically
/// one (top normalization); each refinement satisfies the exact nesting
/// |low_j|^2 + sum_n |high_j^(n)|^2 = |low_{j+1}|^2.
pub struct GeneratorTables {
    pub low: Vec<Vec<f64>>,
    pub high: Vec<Vec<Vec<f64>>>,
}

pub fn generator_tables() -> GeneratorTables {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let low = vec![
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![1.0, h, 0.0, 0.0, 0.0, 0.0],
        vec![1.0, 1.0, h, 0.0, 0.0, 0.0],
        vec![1.0; 6],
    ];
    let high = vec![
        vec![vec![0.0, h, 0.0, 0.0, 0.0, 0.0]],
        vec![vec![0.0, h, h, 0.0, 0.0, 0.0]],
        vec![
            vec![0.0, 0.0, h, 1.0, h, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, h, 1.0],
        ],
    ];
    GeneratorTables { low, high }
}

/// Low-pass framelets at a level: one row per node of that level, columns
/// over vertices a..f. The level-0 row is the corrected value 1/sqrt(6)
/// (consistent with the definition; the original table misprints 1/6).
pub fn framelet_low(level: usize) -> Vec<[f64; 6]> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    match level {
        0 => vec![[1.0 / s6; 6]],
        1 => vec![
            [
                1.0 / 3.0 + s2 / 6.0,
                1.0 / 3.0 + s2 / 6.0,
                -1.0 / 6.0 + s2 / 6.0,
                -1.0 / 6.0 + s2 / 6.0,
                -1.0 / 6.0 + s2 / 6.0,
                -1.0 / 6.0 + s2 / 6.0,
            ],
            [
                1.0 / 3.0 - s2 / 6.0,
                1.0 / 3.0 - s2 / 6.0,
                1.0 / 3.0 + s2 / 12.0,
                1.0 / 3.0 + s2 / 12.0,
                1.0 / 3.0 + s2 / 12.0,
                1.0 / 3.0 + s2 / 12.0,
            ],
        ],
        2 => vec![
            [1.0 / s2, 1.0 / s2, 0.0, 0.0, 0.0, 0.0],
            [
                0.0,
                0.0,
                s3 / 4.0 + s6 / 24.0,
                s3 / 4.0 + s6 / 24.0,
                s3 / 4.0 + s6 / 24.0,
                s3 / 4.0 - s6 / 8.0,
            ],
            [
                0.0,
                0.0,
                0.25 - s2 / 8.0,
                0.25 - s2 / 8.0,
                0.25 - s2 / 8.0,
                0.25 + 3.0 * s2 / 8.0,
            ],
        ],
        3 => (0..6)
            .map(|p| {
                let mut row = [0.0; 6];
                row[p] = 1.0;
                row
            })
            .collect(),
        _ => panic!("no level {level} in the reference example"),
    }
}

/// High-pass framelets of family `n` (0-based) at a level: one row per node
/// of the NEXT finer level. The level-1 single-vertex row is recomputed from
/// the definition (the original table has two typos in it).
pub fn framelet_high(level: usize, n: usize) -> Vec<[f64; 6]> {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    match (level, n) {
        (0, 0) => vec![
            [
                1.0 / 3.0,
                1.0 / 3.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
            ],
            [
                -s2 / 6.0,
                -s2 / 6.0,
                s2 / 12.0,
                s2 / 12.0,
                s2 / 12.0,
                s2 / 12.0,
            ],
        ],
        (1, 0) => vec![
            [
                1.0 / 3.0,
                1.0 / 3.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
                -1.0 / 6.0,
            ],
            [
                -s6 / 12.0,
                -s6 / 12.0,
                s6 / 12.0,
                s6 / 12.0,
                s6 / 12.0,
                -s6 / 12.0,
            ],
            [
                -s2 / 12.0,
                -s2 / 12.0,
                -s2 / 12.0,
                -s2 / 12.0,
                -s2 / 12.0,
                5.0 * s2 / 12.0,
            ],
        ],
        (2, 0) => vec![
            [0.0; 6],
            [0.0; 6],
            [
                0.0,
                0.0,
                2.0 / 3.0 + s2 / 24.0,
                -1.0 / 3.0 + s2 / 24.0,
                -1.0 / 3.0 + s2 / 24.0,
                -s2 / 8.0,
            ],
            [
                0.0,
                0.0,
                -1.0 / 3.0 + s2 / 24.0,
                1.0 / 6.0 + 7.0 * s2 / 24.0,
                1.0 / 6.0 - 5.0 * s2 / 24.0,
                -s2 / 8.0,
            ],
            [
                0.0,
                0.0,
                -1.0 / 3.0 + s2 / 24.0,
                1.0 / 6.0 - 5.0 * s2 / 24.0,
                1.0 / 6.0 + 7.0 * s2 / 24.0,
                -s2 / 8.0,
            ],
            [
                0.0,
                0.0,
                -s2 / 8.0,
                -s2 / 8.0,
                -s2 / 8.0,
                3.0 * s2 / 8.0,
            ],
        ],
        (2, 1) => vec![
            [0.5, -0.5, 0.0, 0.0, 0.0, 0.0],
            [-0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
            [0.0; 6],
            [0.0, 0.0, 0.0, s2 / 4.0, -s2 / 4.0, 0.0],
            [0.0, 0.0, 0.0, -s2 / 4.0, s2 / 4.0, 0.0],
            [0.0; 6],
        ],
        _ => panic!("no high-pass family {n} at level {level} in the reference example"),
    }
}

/// Coarse weight matrices (times 12) at levels 2 and 1, for quick checks.
pub fn coarse_weights_x12() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (
        vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 6.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ],
        vec![vec![2.0, 1.0], vec![1.0, 8.0]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chain_matches_reference_clusters() {
        let c = chain();
        assert_eq!(c.sizes(), vec![1, 2, 3, 6]);
        assert_eq!(c.level(3).parent, vec![0, 0, 1, 1, 1, 2]);
        assert_eq!(c.level(2).parent, vec![0, 1, 1]);
        assert_eq!(c.level(1).parent, vec![0, 0]);
        assert_eq!(c.level(2).cluster_size, vec![2, 3, 1]);
        assert_eq!(c.level(1).cluster_size, vec![2, 4]);
    }

    #[test]
    fn golden_basis_is_orthonormal() {
        let u = golden_basis();
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = (0..6).map(|v| u[i][v] * u[j][v]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn generator_tables_nest_exactly() {
        let t = generator_tables();
        for j in 0..3 {
            for l in 0..6 {
                let mut sum = t.low[j][l] * t.low[j][l];
                for fam in &t.high[j] {
                    sum += fam[l] * fam[l];
                }
                assert_abs_diff_eq!(sum, t.low[j + 1][l] * t.low[j + 1][l], epsilon = 1e-14);
            }
        }
        for l in 0..6 {
            assert_abs_diff_eq!(t.low[3][l], 1.0, epsilon = 0.0);
        }
    }

    #[test]
    fn framelet_tables_form_a_tight_frame() {
        // All 18 rows of the level-decimated system (J1 = 0) must satisfy
        // sum of |<f, row>|^2 = |f|^2; equivalently M^T M = I for the 18x6
        // analysis matrix. This pins the corrected table entries.
        let mut rows: Vec<[f64; 6]> = Vec::new();
        rows.extend(framelet_low(0));
        for j in 0..3 {
            let fams = if j == 2 { 2 } else { 1 };
            for n in 0..fams {
                rows.extend(framelet_high(j, n));
            }
        }
        assert_eq!(rows.len(), 1 + 2 + 3 + 12);
        for u in 0..6 {
            for v in 0..6 {
                let dot: f64 = rows.iter().map(|r| r[u] * r[v]).sum();
                let expect = if u == v { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-12);
            }
        }
    }
}
