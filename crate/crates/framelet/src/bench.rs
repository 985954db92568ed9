//! Complexity benchmark harness: random dense weighted graphs, size-driven
//! chain schedules, operation counts for one transform round trip, and
//! log-log slope fits. Graphs are streamed (only degrees are accumulated),
//! so the harness scales to sizes where a dense matrix would not fit.

use crate::basis::honbc;
use crate::chain::build_chain_slim;
use crate::error::Result;
use crate::transforms::{fast_adft_counted, fast_dft_counted, OpCounter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Fraction of nodes kept per coarsening.
    pub retention: f64,
    /// Transform repetitions per graph (counts and times are averaged).
    pub reps: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            retention: 0.4,
            reps: 1,
            seed: 0,
        }
    }
}

/// One benchmarked size: averaged operation counts and wall time for a
/// decomposition + reconstruction transform pair.
#[derive(Debug, Clone, Copy)]
pub struct BenchRecord {
    pub n: usize,
    pub adds: u64,
    pub muls: u64,
    pub seconds: f64,
}

impl BenchRecord {
    pub fn total_ops(&self) -> u64 {
        self.adds + self.muls
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// Least-squares slope of log(total ops) vs log(N); None below 2 sizes.
    pub count_slope: Option<f64>,
    /// Least-squares slope of log(seconds) vs log(N); hardware-dependent.
    pub time_slope: Option<f64>,
}

/// Chain level count by graph size: 4 levels below 1000 nodes, 5 up to
/// 2500, 6 above.
pub fn level_count(n: usize) -> usize {
    if n < 1000 {
        4
    } else if n <= 2500 {
        5
    } else {
        6
    }
}

/// Coarsening target sizes (finest step first) for a graph of `n` nodes:
/// repeated rounding of `retention` until the schedule's level count is
/// reached, stopping early if a level would not shrink.
pub fn level_schedule(n: usize, retention: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = n;
    for _ in 1..level_count(n) {
        let k = ((prev as f64) * retention).round().max(1.0) as usize;
        if k == 0 || k >= prev {
            break;
        }
        out.push(k);
        prev = k;
    }
    out
}

/// Degrees of a dense random graph with symmetric uniform(0,1) off-diagonal
/// weights and a zero diagonal, without materializing the matrix.
pub fn dense_degrees(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut deg = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w: f64 = rng.random();
            deg[i] += w;
            deg[j] += w;
        }
    }
    deg
}

/// Random assignment of `n_fine` nodes to `k` clusters with sizes differing
/// by at most one (shuffle, then deal round-robin).
pub fn balanced_assignment(n_fine: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut order: Vec<usize> = (0..n_fine).collect();
    for i in (1..n_fine).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut out = vec![0u32; n_fine];
    for (pos, &node) in order.iter().enumerate() {
        out[node] = (pos % k) as u32;
    }
    out
}

/// Benchmark the fast transforms over the given graph sizes with the Haar
/// basis. Deterministic for a fixed seed.
pub fn run_bench(sizes: &[usize], opts: &BenchOptions) -> Result<BenchReport> {
    let mut records = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64));
        let degrees = dense_degrees(n, &mut rng);
        let mut assignments = Vec::new();
        let mut fine = n;
        for k in level_schedule(n, opts.retention) {
            assignments.push(balanced_assignment(fine, k, &mut rng));
            fine = k;
        }
        let chain = build_chain_slim(n, &degrees, &assignments)?;
        let basis = honbc(&chain)?;
        let reps = opts.reps.max(1);
        let mut ops = OpCounter::default();
        let mut seconds = 0.0;
        for _ in 0..reps {
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let start = Instant::now();
            let fhat = fast_dft_counted(&basis, &f, &mut ops)?;
            let back = fast_adft_counted(&basis, &fhat, &mut ops)?;
            seconds += start.elapsed().as_secs_f64();
            // Keep the optimizer honest in timed builds.
            assert!(back[0].is_finite());
        }
        records.push(BenchRecord {
            n,
            adds: ops.adds / reps as u64,
            muls: ops.muls / reps as u64,
            seconds: seconds / reps as f64,
        });
    }
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let count_slope = fit_slope(
        &xs,
        &records
            .iter()
            .map(|r| (r.total_ops() as f64).ln())
            .collect::<Vec<_>>(),
    );
    let time_slope = fit_slope(
        &xs,
        &records
            .iter()
            .map(|r| r.seconds.max(1e-9).ln())
            .collect::<Vec<_>>(),
    );
    Ok(BenchReport {
        records,
        count_slope,
        time_slope,
    })
}

/// Least-squares slope of y against x; None with fewer than two points.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

// ==== tests =================================================================
