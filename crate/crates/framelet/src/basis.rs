//! Chain-adapted global orthonormal bases.
//!
//! Both constructions produce N vectors that are constant on the clusters of
//! every level that can still resolve them: vector index l (1-based) is
//! constant on level-j clusters whenever l <= N_j. The Laplacian variant
//! (`onbc`) completes extended coarse vectors with Gram-Schmidt-processed
//! level Laplacian eigenvectors; the Haar variant (`honbc`) uses a closed-form
//! two-value completion inside each cluster, giving every vector at most two
//! distinct nonzero entries and enabling linear-time transforms.

use crate::chain::Chain;
use crate::error::{FrameletError, Result};
use crate::graph::EigenPairs;
use rayon::prelude::*;
use std::collections::BTreeSet;

// ==== types =================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Laplacian eigenvector completion (dense vectors).
    Laplacian,
    /// Haar two-value completion (sparse vectors, spoc <= 2).
    Haar,
}

/// Sparse description of one basis vector, stored at its home level (the
/// coarsest level whose clusters it is NOT constant on; equivalently the
/// level where it was created).
#[derive(Debug, Clone)]
pub enum VectorForm {
    /// Values on every node of the home level.
    Dense(Vec<f64>),
    /// The same value on every node of the home level (the root vector).
    Constant(f64),
    /// Two-value Haar vector inside one sibling family: the k-th vector
    /// (2-based) over the degree-sorted children of `parent` at the level
    /// above the home level; `parent: None` means the virtual root over the
    /// coarsest level. `head_val` sits on sorted child k-1, `tail_val` on
    /// sorted children k.. (uniformly).
    HaarPair {
        parent: Option<u32>,
        k: u32,
        head_val: f64,
        tail_val: f64,
    },
}

#[derive(Debug, Clone)]
pub struct BasisVector {
    pub home_level: usize,
    pub form: VectorForm,
}

/// A complete orthonormal basis adapted to a chain. Owns the chain.
#[derive(Debug, Clone)]
pub struct ChainBasis {
    kind: BasisKind,
    chain: Chain,
    vectors: Vec<BasisVector>,
    /// Index surrogate l-1 fed to the spectral filters.
    lambda: Vec<f64>,
    /// Raw per-level Laplacian eigenvalues (metadata; Laplacian kind only).
    raw_eigenvalues: Option<Vec<Vec<f64>>>,
    /// Per-vector count of distinct nonzero entries of the vertex expansion.
    spoc_counts: Vec<usize>,
    /// children of each level-j node at level j+1, degree-descending.
    sorted_children: Vec<Vec<Vec<u32>>>,
    /// Coarsest-level nodes, degree-descending.
    root_order: Vec<u32>,
}

impl ChainBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    /// Group boundaries: vectors with index < bounds[j] (0-based) are
    /// constant on level-j clusters. Equals the level sizes.
    pub fn level_bounds(&self) -> Vec<usize> {
        self.chain.sizes()
    }

    pub fn vector(&self, i: usize) -> &BasisVector {
        &self.vectors[i]
    }

    /// Eigenvalue surrogate of vector i (0-based): its index.
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda[i]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// Raw ascending Laplacian eigenvalues per level, when available. These
    /// tag the levels, not individual vectors.
    pub fn raw_eigenvalues(&self) -> Option<&[Vec<f64>]> {
        self.raw_eigenvalues.as_deref()
    }

    pub fn spoc_counts(&self) -> &[usize] {
        &self.spoc_counts
    }

    /// Level whose refinement created vector i.
    pub fn home_level(&self, i: usize) -> usize {
        self.vectors[i].home_level
    }

    pub fn sorted_children(&self, j: usize) -> &[Vec<u32>] {
        &self.sorted_children[j]
    }

    pub fn root_order(&self) -> &[u32] {
        &self.root_order
    }

    /// Values of vector i on the nodes of its home level.
    pub fn home_values(&self, i: usize) -> Vec<f64> {
        let bv = &self.vectors[i];
        let h = bv.home_level;
        match &bv.form {
            VectorForm::Dense(v) => v.clone(),
            VectorForm::Constant(c) => vec![*c; self.chain.level(h).n],
            VectorForm::HaarPair {
                parent,
                k,
                head_val,
                tail_val,
            } => {
                let mut v = vec![0.0; self.chain.level(h).n];
                let sc: &[u32] = match parent {
                    Some(p) => &self.sorted_children[h - 1][*p as usize],
                    None => &self.root_order,
                };
                let k = *k as usize;
                v[sc[k - 2] as usize] = *head_val;
                for &c in &sc[k - 1..] {
                    v[c as usize] = *tail_val;
                }
                v
            }
        }
    }

    /// Values of vector i on the nodes of level j (requires i < N_j, where
    /// the vector is constant on level-j clusters).
    pub fn level_values(&self, i: usize, j: usize) -> Vec<f64> {
        let h = self.vectors[i].home_level;
        debug_assert!(
            h <= j,
            "vector {i} is not constant on level {j} clusters"
        );
        let home = self.home_values(i);
        if h == j {
            return home;
        }
        (0..self.chain.level(j).n)
            .map(|p| home[self.chain.node_ancestor(j, h, p)])
            .collect()
    }

    /// The constant value of vector i on cluster p of level j (i < N_j).
    pub fn cluster_value(&self, i: usize, j: usize, p: usize) -> f64 {
        let h = self.vectors[i].home_level;
        debug_assert!(h <= j);
        let home = self.home_values(i);
        home[self.chain.node_ancestor(j, h, p)]
    }

    /// Expansion of vector i over the original vertices.
    pub fn bottom_values(&self, i: usize) -> Vec<f64> {
        let h = self.vectors[i].home_level;
        let home = self.home_values(i);
        (0..self.chain.n())
            .map(|v| home[self.chain.ancestor(h, v)])
            .collect()
    }
}

// ==== spoc ==================================================================

/// Count of distinct nonzero entries after rounding to 12 significant digits.
pub fn spoc(v: &[f64]) -> usize {
    let mut seen = BTreeSet::new();
    for &x in v {
        let s = format!("{:.11e}", x);
        if s.parse::<f64>().map(|y| y != 0.0).unwrap_or(false) {
            seen.insert(s);
        }
    }
    seen.len()
}

// ==== shared construction pieces ===========================================

fn order_by_degree_desc(ids: Vec<u32>, deg: &[f64]) -> Vec<u32> {
    let mut v = ids;
    v.sort_by(|&a, &b| {
        deg[b as usize]
            .partial_cmp(&deg[a as usize])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.cmp(&b))
    });
    v
}

fn build_sorted_children(c: &Chain) -> (Vec<Vec<Vec<u32>>>, Vec<u32>) {
    let mut sorted = Vec::new();
    for j in 0..c.depth() - 1 {
        let deg = &c.level(j + 1).degrees;
        let per_node: Vec<Vec<u32>> = (0..c.level(j).n)
            .map(|p| order_by_degree_desc(c.children(j, p).to_vec(), deg))
            .collect();
        sorted.push(per_node);
    }
    let root = order_by_degree_desc(
        (0..c.level(0).n as u32).collect(),
        &c.level(0).degrees,
    );
    (sorted, root)
}

/// Head and tail values of the k-th (2-based) Haar vector over a sibling
/// family. `sizes` are the children's cluster cardinalities in sorted order,
/// `parent_size` their total. The vector is orthonormal in the cardinality-
/// weighted inner product to the family's coarser constant and to the k' < k
/// vectors, and its tail is uniform, so it has exactly two distinct values.
fn haar_pair_values(sizes: &[usize], parent_size: usize, k: usize) -> (f64, f64) {
    let ps = parent_size as f64;
    let t2 = |kk: usize| -> f64 {
        sizes[kk - 1..]
            .iter()
            .map(|&s| s as f64 / ps)
            .sum::<f64>()
    };
    let tk = t2(k).sqrt();
    let tk1 = t2(k - 1).sqrt();
    let sk1 = ((sizes[k - 2] as f64) / ps).sqrt();
    let head = tk / (tk1 * (sizes[k - 2] as f64).sqrt());
    let tail = -sk1 / (tk * tk1 * ps.sqrt());
    (head, tail)
}

/// Flip vectors so the first vertex entry with magnitude above 1e-12 is
/// positive; makes construction output deterministic under sign ambiguity.
fn sign_normalize_vectors(basis: &mut ChainBasis) {
    for i in 0..basis.vectors.len() {
        let bottom = basis.bottom_values(i);
        let neg = bottom
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map(|x| *x < 0.0)
            .unwrap_or(false);
        if neg {
            match &mut basis.vectors[i].form {
                VectorForm::Dense(v) => v.iter_mut().for_each(|x| *x = -*x),
                VectorForm::Constant(c) => *c = -*c,
                VectorForm::HaarPair {
                    head_val, tail_val, ..
                } => {
                    *head_val = -*head_val;
                    *tail_val = -*tail_val;
                }
            }
        }
    }
}

fn finish(mut basis: ChainBasis) -> ChainBasis {
    sign_normalize_vectors(&mut basis);
    basis.spoc_counts = (0..basis.n())
        .map(|i| spoc(&basis.bottom_values(i)))
        .collect();
    basis.lambda = (0..basis.n()).map(|i| i as f64).collect();
    basis
}

/// Rebuild a basis from stored vector forms (artifact loading). Derived
/// caches (orderings, spoc counts, surrogate eigenvalues) are recomputed;
/// every form is bounds-checked against the chain before use so a corrupt
/// payload errors instead of panicking later.
pub(crate) fn from_stored(
    chain: Chain,
    kind: BasisKind,
    vectors: Vec<BasisVector>,
    raw_eigenvalues: Option<Vec<Vec<f64>>>,
) -> Result<ChainBasis> {
    let violations = chain.validate();
    if !violations.is_empty() {
        return Err(FrameletError::InvalidChain(violations.join("; ")));
    }
    if vectors.len() != chain.n() {
        return Err(FrameletError::SizeMismatch {
            what: "stored basis vector count".into(),
            expected: chain.n(),
            got: vectors.len(),
        });
    }
    let (sorted_children, root_order) = build_sorted_children(&chain);
    for (i, v) in vectors.iter().enumerate() {
        let h = v.home_level;
        let fail = |reason: String| FrameletError::BasisConstruction { level: h, reason };
        if h >= chain.depth() {
            return Err(fail(format!("vector {i} home level out of range")));
        }
        match &v.form {
            VectorForm::Dense(vals) => {
                if vals.len() != chain.level(h).n {
                    return Err(fail(format!(
                        "vector {i} has {} values, level holds {}",
                        vals.len(),
                        chain.level(h).n
                    )));
                }
                if vals.iter().any(|x| !x.is_finite()) {
                    return Err(fail(format!("vector {i} has non-finite entries")));
                }
            }
            VectorForm::Constant(c) => {
                if !c.is_finite() {
                    return Err(fail(format!("vector {i} has a non-finite value")));
                }
            }
            VectorForm::HaarPair {
                parent,
                k,
                head_val,
                tail_val,
            } => {
                if !head_val.is_finite() || !tail_val.is_finite() {
                    return Err(fail(format!("vector {i} has non-finite entries")));
                }
                let family_len = match parent {
                    None => {
                        if h != 0 {
                            return Err(fail(format!("vector {i} roots below the top")));
                        }
                        root_order.len()
                    }
                    Some(p) => {
                        if h == 0 || *p as usize >= chain.level(h - 1).n {
                            return Err(fail(format!("vector {i} names a bad parent")));
                        }
                        sorted_children[h - 1][*p as usize].len()
                    }
                };
                if *k < 2 || *k as usize > family_len {
                    return Err(fail(format!(
                        "vector {i} index {k} outside its family of {family_len}"
                    )));
                }
            }
        }
    }
    Ok(finish(ChainBasis {
        kind,
        chain,
        vectors,
        lambda: Vec::new(),
        raw_eigenvalues,
        spoc_counts: Vec::new(),
        sorted_children,
        root_order,
    }))
}

// ==== Haar construction =====================================================

/// Haar basis on a chain: the root vector is constant; each refinement step
/// adds, inside every sibling family (children sorted by degree descending,
/// ties by node index; families visited by parent degree descending), the
/// closed-form two-value completions. Every vector has spoc <= 2, and vectors
/// created below level j are supported inside a single level-j cluster.
pub fn honbc(c: &Chain) -> Result<ChainBasis> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(FrameletError::InvalidChain(violations.join("; ")));
    }
    let n = c.n();
    let (sorted_children, root_order) = build_sorted_children(c);
    let mut vectors: Vec<BasisVector> = Vec::with_capacity(n);

    // Coarsest group: constant vector plus the virtual-root family.
    vectors.push(BasisVector {
        home_level: 0,
        form: VectorForm::Constant(1.0 / (n as f64).sqrt()),
    });
    let root_sizes: Vec<usize> = root_order
        .iter()
        .map(|&p| c.level(0).cluster_size[p as usize])
        .collect();
    for k in 2..=c.level(0).n {
        let (head_val, tail_val) = haar_pair_values(&root_sizes, n, k);
        vectors.push(BasisVector {
            home_level: 0,
            form: VectorForm::HaarPair {
                parent: None,
                k: k as u32,
                head_val,
                tail_val,
            },
        });
    }

    // Refinements: group j holds the vectors created between levels j-1 and j.
    for j in 1..c.depth() {
        let parents = order_by_degree_desc(
            (0..c.level(j - 1).n as u32).collect(),
            &c.level(j - 1).degrees,
        );
        for &p in &parents {
            let sc = &sorted_children[j - 1][p as usize];
            let sizes: Vec<usize> = sc
                .iter()
                .map(|&ch| c.level(j).cluster_size[ch as usize])
                .collect();
            let parent_size = c.level(j - 1).cluster_size[p as usize];
            for k in 2..=sc.len() {
                let (head_val, tail_val) = haar_pair_values(&sizes, parent_size, k);
                vectors.push(BasisVector {
                    home_level: j,
                    form: VectorForm::HaarPair {
                        parent: Some(p),
                        k: k as u32,
                        head_val,
                        tail_val,
                    },
                });
            }
        }
        debug_assert_eq!(vectors.len(), c.level(j).n);
    }

    Ok(finish(ChainBasis {
        kind: BasisKind::Haar,
        chain: c.clone(),
        vectors,
        lambda: Vec::new(),
        raw_eigenvalues: None,
        spoc_counts: Vec::new(),
        sorted_children,
        root_order,
    }))
}

// ==== Laplacian construction ================================================

/// Laplacian basis on a chain: at each level, the extended coarser vectors
/// are completed with level Laplacian eigenvectors. Candidates are expressed
/// in cardinality-weighted coordinates, normalized, and selected greedily by
/// largest residual norm (ties toward the lower eigenvalue index) with a
/// linear-independence tolerance of 1e-8; each selected residual is
/// re-orthonormalized and appended. Requires every level graph to be present.
/// A disconnected coarse level usually surfaces as a rank-deficiency error.
pub fn onbc(c: &Chain) -> Result<ChainBasis> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(FrameletError::InvalidChain(violations.join("; ")));
    }
    let (sorted_children, root_order) = build_sorted_children(c);
    let mut vectors: Vec<BasisVector> = Vec::new();
    // Values of every accepted vector at the current level, plus their
    // weighted (restriction) coordinates r[p] = value[p] * sqrt(cluster size).
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut raw_eigs: Vec<Vec<f64>> = Vec::new();

    for j in 0..c.depth() {
        let lv = c.level(j);
        let g = lv
            .graph
            .as_ref()
            .ok_or(FrameletError::LevelGraphMissing { level: j })?;
        let sqrt_w: Vec<f64> = lv.cluster_size.iter().map(|&s| (s as f64).sqrt()).collect();

        if j > 0 {
            // Extend accepted vectors by copying cluster values to children.
            for v in values.iter_mut() {
                *v = lv.parent.iter().map(|&p| v[p as usize]).collect();
            }
        }
        let mut coords: Vec<Vec<f64>> = values
            .iter()
            .map(|v| v.iter().zip(&sqrt_w).map(|(x, w)| x * w).collect())
            .collect();

        let eig = EigenPairs::of_matrix(&g.laplacian(), false)?;
        raw_eigs.push(eig.values.clone());
        // Candidate residuals in weighted coordinates, updated incrementally.
        let mut residuals: Vec<Vec<f64>> = (0..lv.n)
            .map(|i| {
                let mut r: Vec<f64> = (0..lv.n)
                    .map(|p| eig.vectors[(p, i)] * sqrt_w[p])
                    .collect();
                let norm = norm2(&r);
                if norm > 0.0 {
                    r.iter_mut().for_each(|x| *x /= norm);
                }
                for b in &coords {
                    let d = dot(&r, b);
                    r.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
                r
            })
            .collect();
        let mut used = vec![false; lv.n];

        while values.len() < lv.n {
            let mut best = usize::MAX;
            let mut best_norm = 0.0;
            for (i, r) in residuals.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let nr = norm2(r);
                if nr > best_norm + 1e-12 {
                    best_norm = nr;
                    best = i;
                }
            }
            if best == usize::MAX || best_norm < 1e-8 {
                return Err(FrameletError::BasisConstruction {
                    level: j,
                    reason: format!(
                        "rank deficient: largest candidate residual {best_norm:.3e} \
                         cannot complete the basis"
                    ),
                });
            }
            used[best] = true;
            // Re-orthogonalize the winner against the accepted set (twice for
            // numerical hygiene), then normalize.
            let mut w = residuals[best].clone();
            for _ in 0..2 {
                for b in &coords {
                    let d = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let nw = norm2(&w);
            w.iter_mut().for_each(|x| *x /= nw);
            // Knock the new direction out of the remaining residuals.
            for (i, r) in residuals.iter_mut().enumerate() {
                if !used[i] {
                    let d = dot(r, &w);
                    r.iter_mut().zip(&w).for_each(|(x, y)| *x -= d * y);
                }
            }
            let vals: Vec<f64> = w.iter().zip(&sqrt_w).map(|(x, s)| x / s).collect();
            vectors.push(BasisVector {
                home_level: j,
                form: VectorForm::Dense(vals.clone()),
            });
            values.push(vals);
            coords.push(w);
        }
    }

    Ok(finish(ChainBasis {
        kind: BasisKind::Laplacian,
        chain: c.clone(),
        vectors,
        lambda: Vec::new(),
        raw_eigenvalues: Some(raw_eigs),
        spoc_counts: Vec::new(),
        sorted_children,
        root_order,
    }))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

// ==== verification ==========================================================

/// Deviation report for a chain basis.
#[derive(Debug, Clone)]
pub struct BasisReport {
    /// max |<u_i, u_j> - delta_ij| over all pairs.
    pub max_gram_dev: f64,
    /// Per level: max in-cluster spread of any vector valid at that level.
    pub constancy_dev: Vec<f64>,
    /// Per level: max deviation of the weighted restricted Gram from I.
    pub restriction_dev: Vec<f64>,
    /// Sum of spoc over all vectors.
    pub spoc_total: usize,
}

impl BasisReport {
    /// Largest deviation across all checks.
    pub fn max_deviation(&self) -> f64 {
        let mut m = self.max_gram_dev;
        for &d in self.constancy_dev.iter().chain(&self.restriction_dev) {
            m = m.max(d);
        }
        m
    }
}

/// Checks global orthonormality, per-level constancy, and per-level
/// restricted orthonormality of a basis against its chain.
pub fn verify_chain_basis(basis: &ChainBasis) -> BasisReport {
    let c = basis.chain();
    let n = basis.n();
    let bottoms: Vec<Vec<f64>> = (0..n).map(|i| basis.bottom_values(i)).collect();

    let max_gram_dev = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in i..n {
                let d = dot(&bottoms[i], &bottoms[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let mut constancy_dev = Vec::new();
    let mut restriction_dev = Vec::new();
    for j in 0..c.depth() {
        let nj = c.level(j).n;
        let mut cdev = 0.0f64;
        for bottom in bottoms.iter().take(nj) {
            let mut lo = vec![f64::INFINITY; nj];
            let mut hi = vec![f64::NEG_INFINITY; nj];
            for (v, &x) in bottom.iter().enumerate() {
                let p = c.ancestor(j, v);
                lo[p] = lo[p].min(x);
                hi[p] = hi[p].max(x);
            }
            for p in 0..nj {
                cdev = cdev.max(hi[p] - lo[p]);
            }
        }
        constancy_dev.push(cdev);

        let rows: Vec<Vec<f64>> = (0..nj)
            .map(|i| {
                let vals = basis.level_values(i, j);
                vals.iter()
                    .enumerate()
                    .map(|(p, x)| x * (c.level(j).cluster_size[p] as f64).sqrt())
                    .collect()
            })
            .collect();
        let mut rdev = 0.0f64;
        for a in 0..nj {
            for b in a..nj {
                let d = dot(&rows[a], &rows[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                rdev = rdev.max((d - target).abs());
            }
        }
        restriction_dev.push(rdev);
    }

    BasisReport {
        max_gram_dev,
        constancy_dev,
        restriction_dev,
        spoc_total: basis.spoc_counts().iter().sum(),
    }
}

// ==== tests =================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_chain;
    use crate::graph::Graph;
    use crate::toy;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_matches_up_to_sign(got: &[f64], want: &[f64], tol: f64) {
        let flip = got
            .iter()
            .zip(want)
            .find(|(g, w)| g.abs() > 1e-9 && w.abs() > 1e-9)
            .map(|(g, w)| g.signum() != w.signum())
            .unwrap_or(false);
        let s = if flip { -1.0 } else { 1.0 };
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(s * g, *w, epsilon = tol);
        }
    }

    #[test]
    fn haar_reproduces_reference_vectors() {
        let basis = honbc(&toy::chain()).unwrap();
        let golden = toy::golden_basis();
        assert_eq!(basis.n(), 6);
        for (i, want) in golden.iter().enumerate() {
            let got = basis.bottom_values(i);
            assert_matches_up_to_sign(&got, want, 1e-12);
        }
    }

    #[test]
    fn laplacian_reproduces_reference_prefix() {
        let basis = onbc(&toy::chain()).unwrap();
        let golden = toy::golden_basis();
        for (i, want) in golden.iter().enumerate().take(3) {
            let got = basis.bottom_values(i);
            assert_matches_up_to_sign(&got, want, 1e-10);
        }
        assert_abs_diff_eq!(basis.lambda(0), 0.0, epsilon = 0.0);
        assert_eq!(basis.lambdas().len(), 6);
    }

    #[test]
    fn toy_verification_is_clean_for_both_kinds() {
        for basis in [onbc(&toy::chain()).unwrap(), honbc(&toy::chain()).unwrap()] {
            let report = verify_chain_basis(&basis);
            assert!(
                report.max_deviation() <= 1e-10,
                "{:?} deviation {}",
                basis.kind(),
                report.max_deviation()
            );
        }
    }

    #[test]
    fn spoc_examples() {
        let s3 = 3f64.sqrt();
        let u2 = [
            2.0 / (2.0 * s3),
            2.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
            -1.0 / (2.0 * s3),
        ];
        assert_eq!(spoc(&u2), 2);
        assert_eq!(spoc(&[0.7; 5]), 1);
        assert_eq!(spoc(&[0.0; 4]), 0);
        // Tiny values are still nonzero at 12 significant digits; only true
        // zeros are excluded.
        assert_eq!(spoc(&[1.0, -1.0, 1e-17]), 3);
        assert_eq!(spoc(&[1.0, -1.0, 0.0]), 2);
        // Values that agree to 12 significant digits collapse.
        assert_eq!(spoc(&[1.0, 1.0 + 1e-14]), 1);
    }

    #[test]
    fn constant_vector_comes_first() {
        let basis = honbc(&toy::chain()).unwrap();
        let u1 = basis.bottom_values(0);
        for x in u1 {
            assert_abs_diff_eq!(x, 1.0 / 6f64.sqrt(), epsilon = 1e-14);
        }
    }

    fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            edges.push((u, v, rng.random_range(0.2..1.5)));
        }
        for _ in 0..extra {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.push((u, v, rng.random_range(0.2..1.5)));
            }
        }
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn random_chain_invariants_hold_for_both_kinds() {
        let g = random_connected(100, 150, 11);
        let chain = build_chain(&g, &[40, 15, 5], 3, None).unwrap();
        for basis in [onbc(&chain).unwrap(), honbc(&chain).unwrap()] {
            let report = verify_chain_basis(&basis);
            assert!(
                report.max_deviation() <= 1e-10,
                "{:?}: gram {:.2e} constancy {:?} restriction {:?}",
                basis.kind(),
                report.max_gram_dev,
                report.constancy_dev,
                report.restriction_dev
            );
        }
    }

    #[test]
    fn haar_spoc_bound_and_support_disjointness() {
        let g = random_connected(80, 100, 23);
        let chain = build_chain(&g, &[30, 10, 3], 5, None).unwrap();
        let basis = honbc(&chain).unwrap();
        for &s in basis.spoc_counts() {
            assert!(s <= 2);
        }
        assert!(basis.spoc_counts().iter().sum::<usize>() <= 2 * chain.n());
        // A vector born below level j lives inside one level-j cluster.
        let bounds = basis.level_bounds();
        for i in 0..basis.n() {
            let bottom = basis.bottom_values(i);
            for (j, &nj) in bounds.iter().enumerate() {
                if i < nj {
                    continue;
                }
                let clusters: BTreeSet<usize> = bottom
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.abs() > 1e-12)
                    .map(|(v, _)| chain.ancestor(j, v))
                    .collect();
                assert!(
                    clusters.len() <= 1,
                    "vector {i} spans {} level-{j} clusters",
                    clusters.len()
                );
            }
        }
    }

    #[test]
    fn haar_works_without_level_graphs() {
        let g = random_connected(60, 80, 31);
        let chain = build_chain(&g, &[20, 6], 1, None).unwrap();
        let assigns: Vec<Vec<u32>> = (1..chain.depth())
            .rev()
            .map(|j| chain.level(j).parent.clone())
            .collect();
        let slim = crate::chain::build_chain_slim(60, g.degrees(), &assigns).unwrap();
        let basis = honbc(&slim).unwrap();
        let report = verify_chain_basis(&basis);
        assert!(report.max_deviation() <= 1e-10);
        assert!(matches!(
            onbc(&slim),
            Err(FrameletError::LevelGraphMissing { .. })
        ));
    }

    #[test]
    fn perturbed_basis_is_flagged() {
        let mut basis = honbc(&toy::chain()).unwrap();
        if let VectorForm::HaarPair { head_val, .. } = &mut basis.vectors[5].form {
            *head_val += 1e-3;
        } else {
            panic!("expected a two-value vector");
        }
        let report = verify_chain_basis(&basis);
        assert!(report.max_gram_dev > 5e-4 && report.max_gram_dev < 5e-3);
    }

    #[test]
    fn lambda_is_the_index_surrogate() {
        let basis = honbc(&toy::chain()).unwrap();
        for i in 0..6 {
            assert_abs_diff_eq!(basis.lambda(i), i as f64, epsilon = 0.0);
        }
    }

    #[test]
    fn haar_pair_closed_form_equal_sizes() {
        // Three equal children: k=2 gives sqrt(2/3)*(1, -1/2, -1/2) and
        // k=3 gives (1/sqrt2)*(0, 1, -1) in value coordinates.
        let (h2, t2) = haar_pair_values(&[1, 1, 1], 3, 2);
        assert_abs_diff_eq!(h2, (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(t2, -(2.0f64 / 3.0).sqrt() / 2.0, epsilon = 1e-14);
        let (h3, t3) = haar_pair_values(&[1, 1, 1], 3, 3);
        assert_abs_diff_eq!(h3, 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(t3, -1.0 / 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn home_level_groups_follow_level_sizes() {
        let basis = honbc(&toy::chain()).unwrap();
        let homes: Vec<usize> = (0..6).map(|i| basis.home_level(i)).collect();
        assert_eq!(homes, vec![0, 1, 2, 3, 3, 3]);
    }
}
