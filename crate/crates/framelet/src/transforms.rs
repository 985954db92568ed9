//! Fast chain-based spectral transforms.
//!
//! The basis vectors are constant on coarse clusters, so inner products
//! against them reduce to cluster sums computed bottom-up once per transform,
//! followed by per-vector sparse dot products; synthesis runs the same idea
//! backwards with a top-down broadcast. For the two-value Haar basis every
//! family's tail segments share suffix sums, which makes both directions
//! linear in the vertex count plus the level sizes.
//!
//! The multi-level cascade stays in the spectral domain between one initial
//! analysis and one final synthesis; the per-level filters act by pointwise
//! products, decimation by index truncation (legal because the low pass
//! vanishes past the coarse bandwidth, asserted at runtime), and upsampling
//! by zero padding.

use crate::basis::{BasisKind, ChainBasis, VectorForm};
use crate::chain::Chain;
use crate::error::{FrameletError, Result};
use crate::filters::FilterBank;

// ==== op counting ===========================================================

/// Counts multiplies and adds on signal data (index bookkeeping is free).
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.adds + self.muls
    }
}

// ==== provenance ============================================================

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

struct Hasher(u64);

impl Hasher {
    fn new() -> Hasher {
        Hasher(FNV_OFFSET)
    }
    fn bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }
    fn u64(&mut self, x: u64) {
        self.bytes(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.bytes(&x.to_bits().to_le_bytes());
    }
}

/// Content id of a chain: level sizes, parent maps, cluster sizes, degrees.
pub fn chain_id(c: &Chain) -> u64 {
    let mut h = Hasher::new();
    h.u64(c.depth() as u64);
    for level in c.levels() {
        h.u64(level.n as u64);
        for &p in &level.parent {
            h.u64(p as u64);
        }
        for &s in &level.cluster_size {
            h.u64(s as u64);
        }
        for &d in &level.degrees {
            h.f64(d);
        }
    }
    h.0
}

/// Content id of a basis: kind, chain id, and every vector's sparse form.
pub fn basis_id(b: &ChainBasis) -> u64 {
    let mut h = Hasher::new();
    h.u64(match b.kind() {
        BasisKind::Laplacian => 1,
        BasisKind::Haar => 2,
    });
    h.u64(chain_id(b.chain()));
    for i in 0..b.n() {
        let v = b.vector(i);
        h.u64(v.home_level as u64);
        match &v.form {
            VectorForm::Dense(vals) => {
                h.u64(3);
                for &x in vals {
                    h.f64(x);
                }
            }
            VectorForm::Constant(c) => {
                h.u64(4);
                h.f64(*c);
            }
            VectorForm::HaarPair {
                parent,
                k,
                head_val,
                tail_val,
            } => {
                h.u64(5);
                h.u64(parent.map(|p| p as u64 + 1).unwrap_or(0));
                h.u64(*k as u64);
                h.f64(*head_val);
                h.f64(*tail_val);
            }
        }
    }
    h.0
}

/// Content id of a filter bank: level sizes and every filter sample.
pub fn filter_bank_id(fb: &FilterBank) -> u64 {
    let mut h = Hasher::new();
    for &s in fb.level_sizes() {
        h.u64(s as u64);
    }
    for t in 0..fb.n_transitions() {
        let tr = fb.transition(t);
        h.u64(tr.high.len() as u64);
        for &x in &tr.low {
            h.f64(x);
        }
        for fam in &tr.high {
            for &x in fam {
                h.f64(x);
            }
        }
    }
    h.0
}

/// Identifies the chain, basis, and filter bank a coefficient set was
/// produced with; mixing artifacts is an error, not undefined behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub chain_id: u64,
    pub basis_id: u64,
    pub filter_id: u64,
}

// ==== value-space fast transforms ===========================================

/// Cluster sums of a level-j signal at every level up to j:
/// sums[h][q] = sum of g over the level-j nodes inside level-h node q.
fn cluster_sums(chain: &Chain, j: usize, g: &[f64], ops: &mut OpCounter) -> Vec<Vec<f64>> {
    let mut sums: Vec<Vec<f64>> = (0..=j).map(|h| vec![0.0; chain.level(h).n]).collect();
    sums[j].copy_from_slice(g);
    for h in (0..j).rev() {
        let parent = &chain.level(h + 1).parent;
        let (coarse, fine) = sums.split_at_mut(h + 1);
        for (node, &p) in parent.iter().enumerate() {
            coarse[h][p as usize] += fine[0][node];
        }
        ops.adds += chain.level(h + 1).n as u64;
    }
    sums
}

/// Suffix sums over each sibling family's degree-sorted children, plus the
/// virtual-root family over the coarsest nodes. suffix[h][p][t] =
/// sum of sums[h] over sorted children t.. of level-(h-1) node p.
struct SuffixTables {
    root: Vec<f64>,
    families: Vec<Vec<Vec<f64>>>,
}

fn suffix_tables(
    b: &ChainBasis,
    j: usize,
    sums: &[Vec<f64>],
    ops: &mut OpCounter,
) -> SuffixTables {
    let suffix_of = |order: &[u32], vals: &[f64], ops: &mut OpCounter| -> Vec<f64> {
        let mut out = vec![0.0; order.len() + 1];
        for t in (0..order.len()).rev() {
            out[t] = out[t + 1] + vals[order[t] as usize];
        }
        ops.adds += order.len() as u64;
        out
    };
    let root = suffix_of(b.root_order(), &sums[0], ops);
    let mut families = Vec::with_capacity(j);
    #[allow(clippy::needless_range_loop)]
    for h in 1..=j {
        let fams: Vec<Vec<f64>> = b
            .sorted_children(h - 1)
            .iter()
            .map(|order| suffix_of(order, &sums[h], ops))
            .collect();
        families.push(fams);
    }
    SuffixTables { root, families }
}

/// Inner products of a level-j signal against the level-j values of the
/// first N_j basis vectors (those constant on level-j clusters).
fn level_analysis(b: &ChainBasis, j: usize, g: &[f64], ops: &mut OpCounter) -> Vec<f64> {
    let chain = b.chain();
    let sums = cluster_sums(chain, j, g, ops);
    let haar = b.kind() == BasisKind::Haar;
    let tables = haar.then(|| suffix_tables(b, j, &sums, ops));
    let nj = chain.level(j).n;
    let mut out = vec![0.0; nj];
    for (i, o) in out.iter_mut().enumerate() {
        let v = b.vector(i);
        let h = v.home_level;
        match &v.form {
            VectorForm::Constant(c) => {
                let total: f64 = sums[h].iter().sum();
                ops.adds += sums[h].len() as u64;
                ops.muls += 1;
                *o = c * total;
            }
            VectorForm::Dense(vals) => {
                *o = vals.iter().zip(&sums[h]).map(|(a, s)| a * s).sum();
                ops.muls += vals.len() as u64;
                ops.adds += vals.len() as u64;
            }
            VectorForm::HaarPair {
                parent,
                k,
                head_val,
                tail_val,
            } => {
                let k = *k as usize;
                let (order, suffix): (&[u32], &[f64]) = match parent {
                    None => (
                        b.root_order(),
                        tables.as_ref().map(|t| t.root.as_slice()).unwrap_or(&[]),
                    ),
                    Some(p) => (
                        &b.sorted_children(h - 1)[*p as usize],
                        tables
                            .as_ref()
                            .map(|t| t.families[h - 1][*p as usize].as_slice())
                            .unwrap_or(&[]),
                    ),
                };
                let head = sums[h][order[k - 2] as usize];
                let tail = if suffix.is_empty() {
                    // Defensive path for a mixed-form basis without tables.
                    let s: f64 = order[k - 1..]
                        .iter()
                        .map(|&q| sums[h][q as usize])
                        .sum();
                    ops.adds += (order.len() - (k - 1)) as u64;
                    s
                } else {
                    suffix[k - 1]
                };
                *o = head_val * head + tail_val * tail;
                ops.muls += 2;
                ops.adds += 1;
            }
        }
    }
    out
}

/// Values on level j of the combination sum_l c_l u_l over the first N_j
/// basis vectors: per-vector scatter into home-level accumulators (suffix
/// segments become range markers), then one top-down broadcast.
fn level_synthesis(b: &ChainBasis, j: usize, c: &[f64], ops: &mut OpCounter) -> Vec<f64> {
    let chain = b.chain();
    let mut acc: Vec<Vec<f64>> = (0..=j).map(|h| vec![0.0; chain.level(h).n]).collect();
    // Tail markers per family position; converted to adds by a prefix run.
    let mut root_marker = vec![0.0; chain.level(0).n];
    let mut fam_markers: Vec<Vec<Vec<f64>>> = (1..=j)
        .map(|h| {
            b.sorted_children(h - 1)
                .iter()
                .map(|o| vec![0.0; o.len()])
                .collect()
        })
        .collect();
    for (i, &coef) in c.iter().enumerate() {
        if coef == 0.0 {
            continue;
        }
        let v = b.vector(i);
        let h = v.home_level;
        match &v.form {
            VectorForm::Constant(cv) => {
                let x = coef * cv;
                ops.muls += 1;
                for a in acc[h].iter_mut() {
                    *a += x;
                }
                ops.adds += chain.level(h).n as u64;
            }
            VectorForm::Dense(vals) => {
                for (a, &x) in acc[h].iter_mut().zip(vals) {
                    *a += coef * x;
                }
                ops.muls += vals.len() as u64;
                ops.adds += vals.len() as u64;
            }
            VectorForm::HaarPair {
                parent,
                k,
                head_val,
                tail_val,
            } => {
                let k = *k as usize;
                match parent {
                    None => {
                        let order = b.root_order();
                        acc[0][order[k - 2] as usize] += coef * head_val;
                        root_marker[k - 1] += coef * tail_val;
                    }
                    Some(p) => {
                        let order = &b.sorted_children(h - 1)[*p as usize];
                        acc[h][order[k - 2] as usize] += coef * head_val;
                        fam_markers[h - 1][*p as usize][k - 1] += coef * tail_val;
                    }
                }
                ops.muls += 2;
                ops.adds += 2;
            }
        }
    }
    // Prefix-run the markers into the accumulators.
    let mut running = 0.0;
    for (t, &q) in b.root_order().iter().enumerate() {
        running += root_marker[t];
        acc[0][q as usize] += running;
    }
    ops.adds += 2 * chain.level(0).n as u64;
    for h in 1..=j {
        for (p, order) in b.sorted_children(h - 1).iter().enumerate() {
            let mut running = 0.0;
            for (t, &q) in order.iter().enumerate() {
                running += fam_markers[h - 1][p][t];
                acc[h][q as usize] += running;
            }
        }
        ops.adds += 2 * chain.level(h).n as u64;
    }
    // Top-down broadcast: a node's value is its own accumulation plus its
    // parent's value (cluster values extend unchanged).
    for h in 1..=j {
        let parent = &chain.level(h).parent;
        let (coarse, fine) = acc.split_at_mut(h);
        for (q, a) in fine[0].iter_mut().enumerate() {
            *a += coarse[h - 1][parent[q] as usize];
        }
        ops.adds += chain.level(h).n as u64;
    }
    acc.pop().unwrap()
}

// ==== DFT / ADFT ============================================================

fn check_signal_len(b: &ChainBasis, len: usize, what: &str) -> Result<()> {
    if len != b.chain().n() {
        return Err(FrameletError::SizeMismatch {
            what: what.into(),
            expected: b.chain().n(),
            got: len,
        });
    }
    Ok(())
}

/// All N inner products ⟨f, u_l⟩, linear time for the Haar basis.
pub fn fast_dft(b: &ChainBasis, f: &[f64]) -> Result<Vec<f64>> {
    fast_dft_counted(b, f, &mut OpCounter::default())
}

pub fn fast_dft_counted(b: &ChainBasis, f: &[f64], ops: &mut OpCounter) -> Result<Vec<f64>> {
    check_signal_len(b, f.len(), "signal length")?;
    Ok(level_analysis(b, b.chain().depth() - 1, f, ops))
}

/// The expansion sum_l c_l u_l over the original vertices.
pub fn fast_adft(b: &ChainBasis, c: &[f64]) -> Result<Vec<f64>> {
    fast_adft_counted(b, c, &mut OpCounter::default())
}

pub fn fast_adft_counted(b: &ChainBasis, c: &[f64], ops: &mut OpCounter) -> Result<Vec<f64>> {
    check_signal_len(b, c.len(), "coefficient length")?;
    Ok(level_synthesis(b, b.chain().depth() - 1, c, ops))
}

fn check_level(b: &ChainBasis, j: usize) -> Result<()> {
    let depth = b.chain().depth();
    if j >= depth {
        return Err(FrameletError::LevelOutOfRange {
            level: j,
            lo: 0,
            hi: depth - 1,
        });
    }
    Ok(())
}

/// Weighted spectral block of a level-j vector:
/// c_l = sum_p v(p) sqrt(w(j,p)) u_l(p), for l < N_j.
pub fn level_dft(b: &ChainBasis, j: usize, v: &[f64]) -> Result<Vec<f64>> {
    level_dft_counted(b, j, v, &mut OpCounter::default())
}

pub fn level_dft_counted(
    b: &ChainBasis,
    j: usize,
    v: &[f64],
    ops: &mut OpCounter,
) -> Result<Vec<f64>> {
    check_level(b, j)?;
    let nj = b.chain().level(j).n;
    if v.len() != nj {
        return Err(FrameletError::SizeMismatch {
            what: format!("level-{j} block length"),
            expected: nj,
            got: v.len(),
        });
    }
    let g: Vec<f64> = (0..nj)
        .map(|p| v[p] * b.chain().weight(j, p).sqrt())
        .collect();
    ops.muls += nj as u64;
    Ok(level_analysis(b, j, &g, ops))
}

/// Inverse of [`level_dft`] (given the level quadrature identity):
/// v(p) = sqrt(w(j,p)) sum_l c_l u_l(p).
pub fn level_adft(b: &ChainBasis, j: usize, c: &[f64]) -> Result<Vec<f64>> {
    level_adft_counted(b, j, c, &mut OpCounter::default())
}

pub fn level_adft_counted(
    b: &ChainBasis,
    j: usize,
    c: &[f64],
    ops: &mut OpCounter,
) -> Result<Vec<f64>> {
    check_level(b, j)?;
    let nj = b.chain().level(j).n;
    if c.len() != nj {
        return Err(FrameletError::SizeMismatch {
            what: format!("level-{j} spectral length"),
            expected: nj,
            got: c.len(),
        });
    }
    let mut vals = level_synthesis(b, j, c, ops);
    for (p, x) in vals.iter_mut().enumerate() {
        *x *= b.chain().weight(j, p).sqrt();
    }
    ops.muls += nj as u64;
    Ok(vals)
}

// ==== single-transition cascade steps =======================================

fn check_transition(fb: &FilterBank, t: usize) -> Result<()> {
    if t >= fb.n_transitions() {
        return Err(FrameletError::FilterLevelMissing { level: t });
    }
    Ok(())
}

/// One analysis step of the spectral cascade: pointwise low-pass product
/// truncated to the coarse bandwidth (legality asserted), plus one detail
/// block per high pass at full fine bandwidth.
pub fn decompose_level(
    fb: &FilterBank,
    t: usize,
    block: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    decompose_level_counted(fb, t, block, &mut OpCounter::default())
}

pub fn decompose_level_counted(
    fb: &FilterBank,
    t: usize,
    block: &[f64],
    ops: &mut OpCounter,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_transition(fb, t)?;
    let n_coarse = fb.level_sizes()[t];
    let n_fine = fb.level_sizes()[t + 1];
    if block.len() != n_fine {
        return Err(FrameletError::SizeMismatch {
            what: format!("spectral block entering transition {t}"),
            expected: n_fine,
            got: block.len(),
        });
    }
    let tr = fb.transition(t);
    let mut lost = 0.0f64;
    for (x, a) in block[n_coarse..n_fine]
        .iter()
        .zip(&tr.low[n_coarse..n_fine])
    {
        lost = lost.max((x * a).abs());
    }
    if lost > 1e-12 {
        return Err(FrameletError::TruncationLeak { level: t, lost });
    }
    let low: Vec<f64> = (0..n_coarse).map(|l| block[l] * tr.low[l]).collect();
    let high: Vec<Vec<f64>> = tr
        .high
        .iter()
        .map(|filter| (0..n_fine).map(|l| block[l] * filter[l]).collect())
        .collect();
    ops.muls += (n_coarse + tr.high.len() * n_fine) as u64;
    Ok((low, high))
}

/// One synthesis step: zero-pad the coarse block, multiply by the low pass,
/// and add the filtered detail blocks. Exact inverse of [`decompose_level`]
/// for a tight bank.
pub fn reconstruct_level(
    fb: &FilterBank,
    t: usize,
    low: &[f64],
    high: &[Vec<f64>],
) -> Result<Vec<f64>> {
    reconstruct_level_counted(fb, t, low, high, &mut OpCounter::default())
}

pub fn reconstruct_level_counted(
    fb: &FilterBank,
    t: usize,
    low: &[f64],
    high: &[Vec<f64>],
    ops: &mut OpCounter,
) -> Result<Vec<f64>> {
    check_transition(fb, t)?;
    let n_coarse = fb.level_sizes()[t];
    let n_fine = fb.level_sizes()[t + 1];
    let tr = fb.transition(t);
    if low.len() != n_coarse || high.len() != tr.high.len() {
        return Err(FrameletError::SizeMismatch {
            what: format!("blocks entering transition {t} synthesis"),
            expected: n_coarse,
            got: low.len(),
        });
    }
    for w in high {
        if w.len() != n_fine {
            return Err(FrameletError::SizeMismatch {
                what: format!("detail block length at transition {t}"),
                expected: n_fine,
                got: w.len(),
            });
        }
    }
    let mut out = vec![0.0; n_fine];
    for l in 0..n_coarse {
        out[l] = low[l] * tr.low[l];
    }
    ops.muls += n_coarse as u64;
    for (w, filter) in high.iter().zip(&tr.high) {
        for l in 0..n_fine {
            out[l] += w[l] * filter[l];
        }
        ops.muls += n_fine as u64;
        ops.adds += n_fine as u64;
    }
    Ok(out)
}

// ==== multi-level coefficients ==============================================

/// Spectral blocks cached by [`decompose`] so callers can inspect the
/// cascade without re-deriving it; the canonical reconstruction path works
/// from the vertex-domain blocks and does not read this.
#[derive(Debug, Clone)]
pub struct SpectralCache {
    /// Length N_{J1}.
    pub low: Vec<f64>,
    /// high[t][n]: length N_{start+t+1}.
    pub high: Vec<Vec<Vec<f64>>>,
}

/// Multi-level framelet coefficients in the vertex domain: one approximation
/// block on the start level and one detail block per transition and family,
/// each on the transition's finer level.
#[derive(Debug, Clone)]
pub struct Coefficients {
    start_level: usize,
    low: Vec<f64>,
    // high[t][n]: block of family n at transition start_level + t, living on
    // the nodes of level start_level + t + 1.
    high: Vec<Vec<Vec<f64>>>,
    spectral: Option<SpectralCache>,
    provenance: Provenance,
}

impl Coefficients {
    /// Assemble coefficients from explicit blocks (artifact loading); shapes
    /// are validated when the coefficients are used against a bank/basis.
    pub fn from_parts(
        start_level: usize,
        low: Vec<f64>,
        high: Vec<Vec<Vec<f64>>>,
        provenance: Provenance,
    ) -> Coefficients {
        Coefficients {
            start_level,
            low,
            high,
            spectral: None,
            provenance,
        }
    }

    pub fn start_level(&self) -> usize {
        self.start_level
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    /// Detail blocks of the t-th transition above the start level.
    pub fn high(&self, t: usize) -> &[Vec<f64>] {
        &self.high[t]
    }

    pub fn n_detail_levels(&self) -> usize {
        self.high.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn spectral(&self) -> Option<&SpectralCache> {
        self.spectral.as_ref()
    }

    /// Total squared coefficient mass; equals the signal energy for a tight
    /// construction.
    pub fn energy(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        sq(&self.low)
            + self
                .high
                .iter()
                .flatten()
                .map(|b| sq(b))
                .sum::<f64>()
    }

    /// All blocks in stacking order (low, then transitions coarse to fine,
    /// families in order), matching the dense system's row order.
    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        std::iter::once(self.low.as_slice())
            .chain(self.high.iter().flatten().map(|b| b.as_slice()))
    }
}

fn check_bank_matches_chain(fb: &FilterBank, b: &ChainBasis) -> Result<()> {
    if fb.level_sizes() != b.chain().sizes().as_slice() {
        return Err(FrameletError::SizeMismatch {
            what: "filter bank level sizes against the chain".into(),
            expected: b.chain().depth(),
            got: fb.level_sizes().len(),
        });
    }
    Ok(())
}

/// Full multi-level analysis: one fast DFT, a spectral cascade down to
/// `j1`, and one weighted per-level synthesis per output block. Every block
/// equals the dense inner products against the corresponding framelets.
pub fn decompose(fb: &FilterBank, b: &ChainBasis, f: &[f64], j1: usize) -> Result<Coefficients> {
    decompose_counted(fb, b, f, j1, &mut OpCounter::default())
}

pub fn decompose_counted(
    fb: &FilterBank,
    b: &ChainBasis,
    f: &[f64],
    j1: usize,
    ops: &mut OpCounter,
) -> Result<Coefficients> {
    check_bank_matches_chain(fb, b)?;
    check_signal_len(b, f.len(), "signal length")?;
    let depth = b.chain().depth();
    if j1 >= depth {
        return Err(FrameletError::LevelOutOfRange {
            level: j1,
            lo: 0,
            hi: depth - 1,
        });
    }
    let mut block = fast_dft_counted(b, f, ops)?;
    let mut spectral_high: Vec<Vec<Vec<f64>>> = vec![Vec::new(); depth - 1 - j1];
    for t in (j1..depth - 1).rev() {
        let (low, high) = decompose_level_counted(fb, t, &block, ops)?;
        spectral_high[t - j1] = high;
        block = low;
    }
    let low = level_adft_counted(b, j1, &block, ops)?;
    let mut high = Vec::with_capacity(depth - 1 - j1);
    for (t, fams) in spectral_high.iter().enumerate() {
        let level = j1 + t + 1;
        let rows = fams
            .iter()
            .map(|w| level_adft_counted(b, level, w, ops))
            .collect::<Result<Vec<_>>>()?;
        high.push(rows);
    }
    Ok(Coefficients {
        start_level: j1,
        low,
        high,
        spectral: Some(SpectralCache {
            low: block,
            high: spectral_high,
        }),
        provenance: Provenance {
            chain_id: chain_id(b.chain()),
            basis_id: basis_id(b),
            filter_id: filter_bank_id(fb),
        },
    })
}

fn check_provenance(fb: &FilterBank, b: &ChainBasis, co: &Coefficients) -> Result<()> {
    let pairs = [
        ("chain id", chain_id(b.chain()), co.provenance.chain_id),
        ("basis id", basis_id(b), co.provenance.basis_id),
        ("filter bank id", filter_bank_id(fb), co.provenance.filter_id),
    ];
    for (what, expected, got) in pairs {
        if expected != got {
            return Err(FrameletError::ProvenanceMismatch {
                what: what.into(),
                expected,
                got,
            });
        }
    }
    Ok(())
}

/// Full multi-level synthesis: per-block weighted analysis back to the
/// spectral domain, cascade up, one fast ADFT. Inverse of [`decompose`] for
/// tight banks and quadrature-exact bases.
pub fn reconstruct(fb: &FilterBank, b: &ChainBasis, co: &Coefficients) -> Result<Vec<f64>> {
    reconstruct_counted(fb, b, co, &mut OpCounter::default())
}

pub fn reconstruct_counted(
    fb: &FilterBank,
    b: &ChainBasis,
    co: &Coefficients,
    ops: &mut OpCounter,
) -> Result<Vec<f64>> {
    check_bank_matches_chain(fb, b)?;
    check_provenance(fb, b, co)?;
    let depth = b.chain().depth();
    let j1 = co.start_level;
    if j1 >= depth || co.high.len() != depth - 1 - j1 {
        return Err(FrameletError::SizeMismatch {
            what: "coefficient level count".into(),
            expected: depth - 1 - j1.min(depth - 1),
            got: co.high.len(),
        });
    }
    let mut block = level_dft_counted(b, j1, &co.low, ops)?;
    for t in j1..depth - 1 {
        let fams = &co.high[t - j1];
        let spectral: Vec<Vec<f64>> = fams
            .iter()
            .map(|w| level_dft_counted(b, t + 1, w, ops))
            .collect::<Result<Vec<_>>>()?;
        block = reconstruct_level_counted(fb, t, &block, &spectral, ops)?;
    }
    fast_adft_counted(b, &block, ops)
}

// ==== framelet convolution ==================================================

/// Blockwise product of two coefficient sets from the same pipeline.
pub fn blockwise_product(a: &Coefficients, c: &Coefficients) -> Result<Coefficients> {
    if a.provenance != c.provenance {
        return Err(FrameletError::ProvenanceMismatch {
            what: "coefficient provenance in blockwise product".into(),
            expected: a.provenance.chain_id,
            got: c.provenance.chain_id,
        });
    }
    if a.start_level != c.start_level || a.low.len() != c.low.len() {
        return Err(FrameletError::SizeMismatch {
            what: "blockwise product shapes".into(),
            expected: a.low.len(),
            got: c.low.len(),
        });
    }
    let low = a.low.iter().zip(&c.low).map(|(x, y)| x * y).collect();
    let mut high = Vec::with_capacity(a.high.len());
    for (fa, fc) in a.high.iter().zip(&c.high) {
        let mut fams = Vec::with_capacity(fa.len());
        for (ba, bc) in fa.iter().zip(fc) {
            if ba.len() != bc.len() {
                return Err(FrameletError::SizeMismatch {
                    what: "blockwise product detail shapes".into(),
                    expected: ba.len(),
                    got: bc.len(),
                });
            }
            fams.push(ba.iter().zip(bc).map(|(x, y)| x * y).collect());
        }
        high.push(fams);
    }
    Ok(Coefficients {
        start_level: a.start_level,
        low,
        high,
        spectral: None,
        provenance: a.provenance,
    })
}

/// Framelet convolution: decompose both signals over the full system,
/// multiply blockwise, and synthesize the product coefficients.
pub fn framelet_convolve(
    fb: &FilterBank,
    b: &ChainBasis,
    g: &[f64],
    f: &[f64],
) -> Result<Vec<f64>> {
    let cg = decompose(fb, b, g, 0)?;
    let cf = decompose(fb, b, f, 0)?;
    reconstruct(fb, b, &blockwise_product(&cg, &cf)?)
}

// ==== tests =================================================================
