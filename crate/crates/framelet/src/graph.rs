//! Weighted undirected graphs: adjacency, degrees, shortest-path distances,
//! combinatorial Laplacian, and square-root eigen-pairs.

use crate::error::{FrameletError, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Weighted undirected graph with optional self-loops.
///
/// Edges are stored symmetrically; absent pairs mean weight zero. Duplicate
/// edge listings are summed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    /// Per vertex: sorted `(neighbor, weight)` pairs. Self-loops appear once.
    adj: Vec<Vec<(u32, f64)>>,
    degrees: Vec<f64>,
    volume: f64,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Build a graph from an edge list. Vertex ids are 0-based.
    ///
    /// `(u, v, w)` and `(v, u, w)` denote the same edge; duplicates are summed.
    pub fn build(n: usize, edges: &[(usize, usize, f64)]) -> Result<Graph> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n {
                return Err(FrameletError::VertexOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(FrameletError::VertexOutOfRange { id: v, n });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(FrameletError::NegativeWeight { u, v, weight: w });
            }
            let key = (u.min(v), u.max(v));
            *merged.entry(key).or_insert(0.0) += w;
        }
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (&(u, v), &w) in &merged {
            adj[u].push((v as u32, w));
            if u != v {
                adj[v].push((u as u32, w));
            }
        }
        for row in &mut adj {
            row.sort_unstable_by_key(|&(v, _)| v);
        }
        // Degree counts each incident weight once, self-loops included once;
        // this matches row sums of the weight matrix.
        let degrees: Vec<f64> = adj
            .iter()
            .map(|row| row.iter().map(|&(_, w)| w).sum())
            .collect();
        let volume = degrees.iter().sum();
        Ok(Graph {
            n,
            adj,
            degrees,
            volume,
            labels: None,
        })
    }

    /// Attach vertex labels (purely cosmetic, used by file formats).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n {
            return Err(FrameletError::SizeMismatch {
                what: "label count".into(),
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Edge weight between `u` and `v` (0.0 when absent).
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u]
            .binary_search_by_key(&(v as u32), |&(x, _)| x)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0.0)
    }

    /// Neighbors of `u` with weights, sorted by vertex id. Self-loop included.
    pub fn neighbors(&self, u: usize) -> &[(u32, f64)] {
        &self.adj[u]
    }

    /// Canonical edge list: `(u, v, w)` with `u <= v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                let v = v as usize;
                if u <= v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Vertex degrees d(v) = sum of incident weights.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Graph volume: sum of all degrees.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// True when every vertex is reachable from vertex 0 over positive-weight
    /// edges. The empty graph and the one-vertex graph count as connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, w) in &self.adj[u] {
                let v = v as usize;
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Index of the first vertex unreachable from vertex 0, if any.
    pub fn first_unreachable(&self) -> Option<usize> {
        let d = self.distances(0);
        d.iter().position(|x| !x.is_finite())
    }

    /// Single-source shortest-path lengths (path length = sum of edge
    /// weights). Unreachable vertices get `f64::INFINITY`.
    pub fn distances(&self, source: usize) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0
                    .partial_cmp(&other.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(self.1.cmp(&other.1))
            }
        }

        let mut dist = vec![f64::INFINITY; self.n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(Entry(0.0, source)));
        while let Some(Reverse(Entry(d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let v = v as usize;
                if u == v {
                    continue;
                }
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse(Entry(nd, v)));
                }
            }
        }
        dist
    }

    /// Dense combinatorial Laplacian L = D - W. Row sums vanish; a self-loop
    /// contributes to both D and W and cancels on the diagonal.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            l[(u, u)] = self.degrees[u];
            for &(v, w) in &self.adj[u] {
                l[(u, v as usize)] -= w;
            }
        }
        l
    }

    /// Dense weight matrix W.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                m[(u, v as usize)] = w;
            }
        }
        m
    }

    /// Square-root eigen-pairs of the Laplacian. Requires a connected graph.
    pub fn sqrt_eigenpairs(&self) -> Result<EigenPairs> {
        if let Some(v) = self.first_unreachable() {
            return Err(FrameletError::Disconnected { vertex: v });
        }
        EigenPairs::of_matrix(&self.laplacian(), true)
    }
}

/// Orthonormal eigenvectors of a symmetric matrix with nondecreasing
/// nonnegative scalar tags.
///
/// For a graph Laplacian the tags are square roots of the eigenvalues (tiny
/// negatives clamped to zero first). Vectors are sign-normalized so the first
/// entry exceeding 1e-12 in magnitude is positive; equal values are ordered by
/// lexicographic comparison of the sign-normalized vectors.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Nondecreasing; square roots when built via [`Graph::sqrt_eigenpairs`].
    pub values: Vec<f64>,
    /// Column `l` is the vector paired with `values[l]`.
    pub vectors: DMatrix<f64>,
}

impl EigenPairs {
    /// Eigendecomposition of a symmetric matrix, sorted, sign-normalized,
    /// deterministically tie-broken. `sqrt_values` clamps negatives to zero
    /// and stores square roots.
    pub fn of_matrix(m: &DMatrix<f64>, sqrt_values: bool) -> Result<EigenPairs> {
        let n = m.nrows();
        if n == 0 {
            return Err(FrameletError::Eigen("empty matrix".into()));
        }
        let eig = m.clone().symmetric_eigen();
        let mut cols: Vec<(f64, DVector<f64>)> = (0..n)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
            .collect();
        for (_, v) in &mut cols {
            sign_normalize(v.as_mut_slice());
        }
        cols.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| lex_cmp(a.1.as_slice(), b.1.as_slice()))
        });
        // Snap eigenvalues that are zero up to numerical noise to exact zero;
        // the square root would otherwise amplify 1e-16 noise to 1e-8.
        let scale = cols
            .iter()
            .map(|(v, _)| v.abs())
            .fold(1.0f64, f64::max);
        let mut values = Vec::with_capacity(n);
        let mut vectors = DMatrix::zeros(n, n);
        for (i, (val, v)) in cols.into_iter().enumerate() {
            let val = if val.abs() < 1e-12 * scale { 0.0 } else { val };
            let val = if sqrt_values { val.max(0.0).sqrt() } else { val };
            values.push(val);
            vectors.set_column(i, &v);
        }
        Ok(EigenPairs { values, vectors })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Largest scalar tag.
    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Flip a vector's sign so its first entry with magnitude above 1e-12 is
/// positive.
pub fn sign_normalize(v: &mut [f64]) {
    for &x in v.iter() {
        if x.abs() > 1e-12 {
            if x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}
