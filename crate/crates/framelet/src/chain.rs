//! Coarse-grained chains: nested partitions of a graph with per-level coarse
//! graphs, parent maps, cluster sizes, and quadrature weights.

use crate::error::{FrameletError, Result};
use crate::graph::Graph;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One level of a chain.
///
/// `graph` may be absent for levels built in slim mode (degree-only), which is
/// enough for the Haar basis and the fast transforms; the Laplacian basis
/// requires the graphs.
#[derive(Debug, Clone)]
pub struct ChainLevel {
    pub n: usize,
    /// For every node of this level, its node at the next-coarser level.
    /// Empty at the coarsest level.
    pub parent: Vec<u32>,
    /// Number of original (bottom) vertices inside each node's cluster.
    pub cluster_size: Vec<usize>,
    /// Node degrees in the level graph (aggregated when `graph` is absent).
    pub degrees: Vec<f64>,
    pub graph: Option<Graph>,
}

/// Nested partition hierarchy from the original graph (bottom, finest) to a
/// coarsest level. Level index 0 is the coarsest; the last level is the
/// original graph with singleton clusters and unit quadrature weights.
#[derive(Debug, Clone)]
pub struct Chain {
    levels: Vec<ChainLevel>,
    /// children[j][p] = nodes of level j+1 inside node p of level j (sorted).
    children: Vec<Vec<Vec<u32>>>,
    /// ancestor[j][v] = node of level j containing bottom vertex v.
    ancestor: Vec<Vec<u32>>,
}

impl Chain {
    fn assemble(levels: Vec<ChainLevel>) -> Chain {
        let depth = levels.len();
        let mut children: Vec<Vec<Vec<u32>>> = Vec::new();
        for j in 0..depth.saturating_sub(1) {
            let mut c = vec![Vec::new(); levels[j].n];
            for (node, &p) in levels[j + 1].parent.iter().enumerate() {
                c[p as usize].push(node as u32);
            }
            children.push(c);
        }
        let n = levels.last().map(|l| l.n).unwrap_or(0);
        let mut ancestor: Vec<Vec<u32>> = vec![Vec::new(); depth];
        if depth > 0 {
            ancestor[depth - 1] = (0..n as u32).collect();
            for j in (0..depth - 1).rev() {
                ancestor[j] = ancestor[j + 1]
                    .iter()
                    .map(|&node| levels[j + 1].parent[node as usize])
                    .collect();
            }
        }
        Chain {
            levels,
            children,
            ancestor,
        }
    }

    /// Number of levels (coarsest through bottom).
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Bottom (original) vertex count.
    pub fn n(&self) -> usize {
        self.levels.last().map(|l| l.n).unwrap_or(0)
    }

    pub fn level(&self, j: usize) -> &ChainLevel {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    /// Level sizes, coarsest first.
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.n).collect()
    }

    /// Children at level j+1 of node `p` at level j.
    pub fn children(&self, j: usize, p: usize) -> &[u32] {
        &self.children[j][p]
    }

    /// The level-j node whose cluster contains bottom vertex `v`.
    pub fn ancestor(&self, j: usize, v: usize) -> usize {
        self.ancestor[j][v] as usize
    }

    /// The level-h node containing node `p` of level j (h <= j).
    pub fn node_ancestor(&self, j: usize, h: usize, p: usize) -> usize {
        debug_assert!(h <= j);
        let mut node = p;
        for lv in (h + 1..=j).rev() {
            node = self.levels[lv].parent[node] as usize;
        }
        node
    }

    /// Quadrature weight of node `p` at level j (cluster cardinality).
    pub fn weight(&self, j: usize, p: usize) -> f64 {
        self.levels[j].cluster_size[p] as f64
    }

    /// Checks nesting, partition, monotonicity, and weight bookkeeping.
    /// Returns human-readable violations; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n();
        if self.levels.is_empty() {
            out.push("chain has no levels".into());
            return out;
        }
        for j in 0..self.depth() {
            let lv = &self.levels[j];
            if lv.cluster_size.len() != lv.n || lv.degrees.len() != lv.n {
                out.push(format!("level {j}: field lengths disagree with n={}", lv.n));
            }
            let total: usize = lv.cluster_size.iter().sum();
            if total != n {
                out.push(format!(
                    "level {j}: cluster sizes sum to {total}, expected {n}"
                ));
            }
            if j > 0 {
                if self.levels[j - 1].n >= lv.n {
                    out.push(format!(
                        "level {j}: size {} not larger than coarser level's {}",
                        lv.n,
                        self.levels[j - 1].n
                    ));
                }
                if lv.parent.len() != lv.n {
                    out.push(format!("level {j}: parent map has wrong length"));
                } else if let Some(&bad) = lv
                    .parent
                    .iter()
                    .find(|&&p| (p as usize) >= self.levels[j - 1].n)
                {
                    out.push(format!("level {j}: parent id {bad} out of range"));
                }
                // Nesting: parent cluster sizes must equal the sum of their
                // children's cluster sizes.
                let mut acc = vec![0usize; self.levels[j - 1].n];
                for (node, &p) in lv.parent.iter().enumerate() {
                    if (p as usize) < acc.len() {
                        acc[p as usize] += lv.cluster_size[node];
                    }
                }
                if acc != self.levels[j - 1].cluster_size {
                    out.push(format!(
                        "level {}: cluster sizes do not aggregate to level {}'s",
                        j,
                        j - 1
                    ));
                }
            }
            if j + 1 == self.depth() && lv.cluster_size.iter().any(|&s| s != 1) {
                out.push("bottom level has non-singleton clusters".into());
            }
            if let Some(g) = &lv.graph {
                if g.n() != lv.n {
                    out.push(format!("level {j}: graph size disagrees"));
                }
            }
        }
        out
    }

}

/// Result of one coarsening step.
pub struct Coarsened {
    pub graph: Graph,
    /// assignment[v] = cluster id (0..k) of vertex v in the finer graph.
    pub assignment: Vec<u32>,
    /// Final medoid vertex per cluster.
    pub centers: Vec<usize>,
}

/// k-medoid coarsening of a connected graph on shortest-path distances.
///
/// Nodes are assigned to the nearest center (ties toward the lowest center
/// index), centers re-chosen to minimize intra-cluster distance sums (ties
/// toward the lowest vertex id), iterated to a fixed point with a 100-round
/// cap. A center stranded with an empty cluster steals the farthest member of
/// the largest cluster. Coarse weights aggregate ordered vertex pairs divided
/// by the graph volume, so intra-cluster edges appear twice, as self-loops.
pub fn coarsen_once(
    g: &Graph,
    k: usize,
    seed: u64,
    fixed_centers: Option<&[usize]>,
) -> Result<Coarsened> {
    let n = g.n();
    if k < 1 || k >= n {
        return Err(FrameletError::InvalidClusterCount { k, n });
    }
    if let Some(v) = g.first_unreachable() {
        return Err(FrameletError::Disconnected { vertex: v });
    }
    let dist: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| g.distances(s))
        .collect();

    let mut centers: Vec<usize> = match fixed_centers {
        Some(c) => {
            if c.len() != k {
                return Err(FrameletError::InvalidAssignment(format!(
                    "expected {k} centers, got {}",
                    c.len()
                )));
            }
            for &v in c {
                if v >= n {
                    return Err(FrameletError::VertexOutOfRange { id: v, n });
                }
            }
            c.to_vec()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = sample(&mut rng, n, k).into_vec();
            picked.sort_unstable();
            picked
        }
    };

    let mut assignment = vec![0u32; n];
    for _round in 0..100 {
        assign_nearest(&dist, &centers, &mut assignment);
        repair_empty(&dist, &mut centers, &mut assignment, k);
        let mut next = centers.clone();
        for (ci, slot) in next.iter_mut().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&v| assignment[v] == ci as u32).collect();
            let mut best = *slot;
            let mut best_cost = f64::INFINITY;
            for &cand in &members {
                let cost: f64 = members.iter().map(|&m| dist[cand][m]).sum();
                if cost < best_cost - 1e-15 || (cost <= best_cost + 1e-15 && cand < best) {
                    best = cand;
                    best_cost = cost;
                }
            }
            *slot = best;
        }
        if next == centers {
            break;
        }
        centers = next;
    }
    assign_nearest(&dist, &centers, &mut assignment);
    repair_empty(&dist, &mut centers, &mut assignment, k);

    let graph = coarse_graph(g, &assignment, k)?;
    Ok(Coarsened {
        graph,
        assignment,
        centers,
    })
}

fn assign_nearest(dist: &[Vec<f64>], centers: &[usize], assignment: &mut [u32]) {
    for (v, slot) in assignment.iter_mut().enumerate() {
        let mut best = 0u32;
        let mut best_d = f64::INFINITY;
        for (ci, &c) in centers.iter().enumerate() {
            let d = dist[c][v];
            if d < best_d {
                best_d = d;
                best = ci as u32;
            }
        }
        *slot = best;
    }
}

fn repair_empty(dist: &[Vec<f64>], centers: &mut [usize], assignment: &mut [u32], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignment.iter() {
            counts[a as usize] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // Largest cluster, ties toward the lowest index.
        let donor = (0..k).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
        // Farthest member from the donor's center, ties toward the lowest id.
        let dc = centers[donor];
        let mut stolen = usize::MAX;
        let mut far = -1.0;
        for (v, &a) in assignment.iter().enumerate() {
            if a as usize == donor && v != dc {
                let d = dist[dc][v];
                if d > far + 1e-15 || (d >= far - 1e-15 && stolen == usize::MAX) {
                    far = d;
                    stolen = v;
                }
            }
        }
        if stolen == usize::MAX {
            return; // donor is a singleton; nothing to steal
        }
        assignment[stolen] = empty as u32;
        centers[empty] = stolen;
    }
}

/// Aggregate a graph along a cluster assignment using the ordered-pair weight
/// rule w_c([u],[v]) = sum over u in [u], v in [v] of w(u,v) / vol(g).
pub fn coarse_graph(g: &Graph, assignment: &[u32], k: usize) -> Result<Graph> {
    if assignment.len() != g.n() {
        return Err(FrameletError::SizeMismatch {
            what: "assignment length".into(),
            expected: g.n(),
            got: assignment.len(),
        });
    }
    let vol = g.volume();
    if vol <= 0.0 {
        return Err(FrameletError::InvalidAssignment(
            "cannot coarsen a graph with zero volume".into(),
        ));
    }
    let mut seen = vec![false; k];
    for &a in assignment {
        if (a as usize) >= k {
            return Err(FrameletError::InvalidAssignment(format!(
                "cluster id {a} out of range 0..{k}"
            )));
        }
        seen[a as usize] = true;
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(FrameletError::InvalidAssignment(format!(
            "cluster {i} is empty"
        )));
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (u, v, w) in g.edges() {
        let cu = assignment[u] as usize;
        let cv = assignment[v] as usize;
        if cu == cv {
            // Ordered pairs (u,v) and (v,u) both land inside the cluster; an
            // original self-loop is a single ordered pair.
            let m = if u == v { w } else { 2.0 * w };
            edges.push((cu, cu, m / vol));
        } else {
            edges.push((cu.min(cv), cu.max(cv), w / vol));
        }
    }
    Graph::build(k, &edges)
}

/// Build a chain by repeated k-medoid coarsening.
///
/// `sizes` lists target level sizes from finest-coarse to coarsest (strictly
/// decreasing, all below the vertex count). Empty `sizes` yields the
/// single-level chain. `fixed_centers`, when given, supplies the center
/// vertices for each coarsening step in the same order.
pub fn build_chain(
    g: &Graph,
    sizes: &[usize],
    seed: u64,
    fixed_centers: Option<&[Vec<usize>]>,
) -> Result<Chain> {
    validate_sizes(g.n(), sizes)?;
    if let Some(fc) = fixed_centers {
        if fc.len() != sizes.len() {
            return Err(FrameletError::InvalidAssignment(format!(
                "expected {} center lists, got {}",
                sizes.len(),
                fc.len()
            )));
        }
    }
    let mut assignments = Vec::new();
    let mut graphs = vec![g.clone()];
    for (i, &k) in sizes.iter().enumerate() {
        let current = graphs.last().unwrap();
        let centers = fixed_centers.map(|fc| fc[i].as_slice());
        let c = coarsen_once(current, k, seed.wrapping_add(i as u64), centers)?;
        assignments.push(c.assignment);
        graphs.push(c.graph);
    }
    Ok(chain_from_parts(graphs, assignments))
}

/// Build a chain from externally supplied cluster assignments (finest step
/// first), aggregating coarse graphs with the standard weight rule.
pub fn build_chain_with_assignments(g: &Graph, assignments: &[Vec<u32>]) -> Result<Chain> {
    let mut sizes = Vec::new();
    let mut graphs = vec![g.clone()];
    let mut kept: Vec<Vec<u32>> = Vec::new();
    for a in assignments {
        let k = a.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        let current = graphs.last().unwrap();
        if k == 0 || k >= current.n() {
            return Err(FrameletError::InvalidClusterCount { k, n: current.n() });
        }
        let cg = coarse_graph(current, a, k)?;
        sizes.push(k);
        graphs.push(cg);
        kept.push(a.clone());
    }
    validate_sizes(g.n(), &sizes)?;
    Ok(chain_from_parts(graphs, kept))
}

/// Build a chain without materializing any level graph: only degrees are
/// aggregated. Supports the Haar basis and the fast transforms at scales
/// where dense level graphs are not wanted.
pub fn build_chain_slim(
    n: usize,
    bottom_degrees: &[f64],
    assignments: &[Vec<u32>],
) -> Result<Chain> {
    if bottom_degrees.len() != n {
        return Err(FrameletError::SizeMismatch {
            what: "degree vector".into(),
            expected: n,
            got: bottom_degrees.len(),
        });
    }
    let vol: f64 = bottom_degrees.iter().sum();
    if vol <= 0.0 {
        return Err(FrameletError::InvalidAssignment(
            "zero graph volume".into(),
        ));
    }
    let mut sizes = Vec::new();
    for a in assignments {
        let k = a.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        sizes.push(k);
    }
    validate_sizes(n, &sizes)?;

    // Coarse degree = sum of member degrees / finer volume; after the first
    // aggregation the volume is exactly 1.
    let mut levels_rev: Vec<ChainLevel> = Vec::new();
    levels_rev.push(ChainLevel {
        n,
        parent: assignments.first().cloned().unwrap_or_default(),
        cluster_size: vec![1; n],
        degrees: bottom_degrees.to_vec(),
        graph: None,
    });
    let mut cur_deg: Vec<f64> = bottom_degrees.to_vec();
    let mut cur_sizes: Vec<usize> = vec![1; n];
    let mut cur_vol = vol;
    for (i, a) in assignments.iter().enumerate() {
        let k = sizes[i];
        let mut deg = vec![0.0; k];
        let mut cs = vec![0usize; k];
        for (node, &c) in a.iter().enumerate() {
            let c = c as usize;
            if c >= k {
                return Err(FrameletError::InvalidAssignment(format!(
                    "cluster id {c} out of range"
                )));
            }
            deg[c] += cur_deg[node];
            cs[c] += cur_sizes[node];
        }
        if let Some(z) = cs.iter().position(|&s| s == 0) {
            return Err(FrameletError::InvalidAssignment(format!(
                "cluster {z} is empty"
            )));
        }
        for d in deg.iter_mut() {
            *d /= cur_vol;
        }
        cur_vol = 1.0;
        levels_rev.push(ChainLevel {
            n: k,
            parent: assignments.get(i + 1).cloned().unwrap_or_default(),
            cluster_size: cs.clone(),
            degrees: deg.clone(),
            graph: None,
        });
        cur_deg = deg;
        cur_sizes = cs;
    }
    levels_rev.reverse();
    Ok(Chain::assemble(levels_rev))
}

fn validate_sizes(n: usize, sizes: &[usize]) -> Result<()> {
    let mut prev = n;
    for &s in sizes {
        if s == 0 || s >= prev {
            return Err(FrameletError::InvalidLevelSizes {
                n,
                sizes: sizes.to_vec(),
            });
        }
        prev = s;
    }
    Ok(())
}

fn chain_from_parts(graphs: Vec<Graph>, assignments: Vec<Vec<u32>>) -> Chain {
    // graphs[0] = bottom, graphs[i] = after i coarsenings; assignments[i]
    // maps graphs[i] nodes into graphs[i+1] nodes. Internal level index j
    // counts from the coarsest, so level j is graphs[steps - j] and its
    // parent map is assignments[steps - j] (into the next-coarser level).
    let steps = assignments.len();
    let mut cluster_size: Vec<Vec<usize>> = Vec::with_capacity(steps + 1);
    cluster_size.push(vec![1; graphs[0].n()]);
    for i in 0..steps {
        let k = graphs[i + 1].n();
        let mut cs = vec![0usize; k];
        for (node, &c) in assignments[i].iter().enumerate() {
            cs[c as usize] += cluster_size[i][node];
        }
        cluster_size.push(cs);
    }
    let mut levels: Vec<ChainLevel> = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let gi = steps - j;
        let parent = if j == 0 {
            Vec::new()
        } else {
            assignments[gi].clone()
        };
        levels.push(ChainLevel {
            n: graphs[gi].n(),
            parent,
            cluster_size: cluster_size[gi].clone(),
            degrees: graphs[gi].degrees().to_vec(),
            graph: Some(graphs[gi].clone()),
        });
    }
    Chain::assemble(levels)
}

/// Seeded balanced partitioner: shuffles vertices and deals them round-robin
/// into k clusters. Used to inject chains on graphs too large for k-medoid
/// distance matrices; quality is irrelevant for transform-cost scaling.
pub fn balanced_assignment(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut a = vec![0u32; n];
    for (i, &v) in perm.iter().enumerate() {
        a[v] = (i % k) as u32;
    }
    a
}
