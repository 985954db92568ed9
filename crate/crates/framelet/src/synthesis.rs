//! Dense framelet synthesis: the brute-force oracle.
//!
//! Every framelet is expanded explicitly over the original vertices by
//! summing basis vectors against generator samples. The stacked rows form the
//! analysis operator whose extreme eigenvalues are the frame bounds; a tight
//! construction gives exactly (1, 1). Fast transforms are validated against
//! these expansions, so everything here favors directness over speed.

use crate::basis::ChainBasis;
use crate::error::{FrameletError, Result};
use crate::filters::{alpha_window, GammaPartition, GeneratorOptions, GeneratorSet};
use crate::graph::EigenPairs;
use nalgebra::DMatrix;
use rayon::prelude::*;

// ==== framelet systems ======================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Decimated,
    Undecimated,
}

/// A dense framelet system: one low-pass row per start-level node (or per
/// vertex when undecimated) plus high-pass detail rows grouped by level and
/// family. Rows are expansions over the original vertices, stacked in the
/// order low pass first, then levels coarse to fine, families in order, and
/// nodes ascending within a family.
#[derive(Debug, Clone)]
pub struct FrameletSystem {
    kind: SystemKind,
    start_level: usize,
    n: usize,
    low: Vec<Vec<f64>>,
    // high[t][fam][node]: rows of family `fam` at level start_level + t.
    high: Vec<Vec<Vec<Vec<f64>>>>,
}

impl FrameletSystem {
    pub(crate) fn from_parts(
        kind: SystemKind,
        start_level: usize,
        n: usize,
        low: Vec<Vec<f64>>,
        high: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> FrameletSystem {
        FrameletSystem {
            kind,
            start_level,
            n,
            low,
            high,
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn start_level(&self) -> usize {
        self.start_level
    }

    /// Length of each row (original vertex count).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn low_rows(&self) -> &[Vec<f64>] {
        &self.low
    }

    /// Detail rows of family `fam` at the t-th synthesized level.
    pub fn high_rows(&self, t: usize, fam: usize) -> &[Vec<f64>] {
        &self.high[t][fam]
    }

    pub fn n_detail_levels(&self) -> usize {
        self.high.len()
    }

    pub fn n_families(&self, t: usize) -> usize {
        self.high[t].len()
    }

    pub fn element_count(&self) -> usize {
        self.low.len()
            + self
                .high
                .iter()
                .flatten()
                .map(|rows| rows.len())
                .sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.element_count() == 0
    }

    /// All rows in stacking order.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.low
            .iter()
            .map(|r| r.as_slice())
            .chain(
                self.high
                    .iter()
                    .flatten()
                    .flatten()
                    .map(|r| r.as_slice()),
            )
    }
}

/// The stacked analysis operator: one row per framelet, one column per
/// original vertex.
pub fn dense_analysis_matrix(fs: &FrameletSystem) -> DMatrix<f64> {
    let m = fs.element_count();
    let mut w = DMatrix::zeros(m, fs.n());
    for (i, row) in fs.rows().enumerate() {
        for (v, &x) in row.iter().enumerate() {
            w[(i, v)] = x;
        }
    }
    w
}

// ==== decimated synthesis ===================================================

fn check_gs_matches_chain(b: &ChainBasis, gs: &GeneratorSet) -> Result<()> {
    let sizes = b.chain().sizes();
    if gs.level_sizes() != sizes.as_slice() {
        return Err(FrameletError::SizeMismatch {
            what: "generator level sizes against the chain".into(),
            expected: sizes.len(),
            got: gs.level_sizes().len(),
        });
    }
    Ok(())
}

/// Expand one decimated framelet over the original vertices. Pass 0 is the
/// low pass anchored at a level-j node; pass n >= 1 is detail family n
/// anchored at a level-(j+1) node. The row is
/// sqrt(w) * sum_l sample[l] * u_l(anchor cluster) * u_l(vertex),
/// where the sum truncates to the sample support.
pub fn synth_decimated(
    b: &ChainBasis,
    gs: &GeneratorSet,
    j: usize,
    node: usize,
    pass: usize,
) -> Result<Vec<f64>> {
    check_gs_matches_chain(b, gs)?;
    let depth = b.chain().depth();
    if j >= depth {
        return Err(FrameletError::LevelOutOfRange {
            level: j,
            lo: 0,
            hi: depth - 1,
        });
    }
    let (samples, anchor_level) = if pass == 0 {
        (gs.low(j), j)
    } else {
        if pass > gs.r(j) {
            return Err(FrameletError::FilterParam(format!(
                "pass {pass} out of range: level {j} has {} detail families",
                gs.r(j)
            )));
        }
        (&gs.high(j)[pass - 1][..], j + 1)
    };
    let level_n = b.chain().level(anchor_level).n;
    if node >= level_n {
        return Err(FrameletError::NodeOutOfRange {
            node,
            level: anchor_level,
        });
    }
    let sqrt_w = b.chain().weight(anchor_level, node).sqrt();
    let mut out = vec![0.0; b.chain().n()];
    for (i, &s) in samples.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        if b.home_level(i) > anchor_level {
            return Err(FrameletError::FilterParam(format!(
                "generator sample at grid index {} exceeds the level-{} bandwidth",
                i + 1,
                anchor_level
            )));
        }
        let coef = sqrt_w * s * b.cluster_value(i, anchor_level, node);
        if coef == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b.bottom_values(i)) {
            *o += coef * x;
        }
    }
    Ok(out)
}

/// Synthesize the whole decimated system that starts at level `j1`: low
/// passes on the level-j1 nodes, then detail families for every transition
/// from j1 to the bottom.
pub fn build_framelet_system(
    b: &ChainBasis,
    gs: &GeneratorSet,
    j1: usize,
) -> Result<FrameletSystem> {
    check_gs_matches_chain(b, gs)?;
    let depth = b.chain().depth();
    if j1 >= depth {
        return Err(FrameletError::LevelOutOfRange {
            level: j1,
            lo: 0,
            hi: depth - 1,
        });
    }
    let low = (0..b.chain().level(j1).n)
        .into_par_iter()
        .map(|p| synth_decimated(b, gs, j1, p, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut high = Vec::new();
    for j in j1..depth - 1 {
        let mut fams = Vec::with_capacity(gs.r(j));
        for pass in 1..=gs.r(j) {
            let rows = (0..b.chain().level(j + 1).n)
                .into_par_iter()
                .map(|u| synth_decimated(b, gs, j, u, pass))
                .collect::<Result<Vec<_>>>()?;
            fams.push(rows);
        }
        high.push(fams);
    }
    Ok(FrameletSystem::from_parts(
        SystemKind::Decimated,
        j1,
        b.chain().n(),
        low,
        high,
    ))
}

// ==== frame bounds and quadrature ===========================================

/// Smallest and largest eigenvalue of the Gram operator of the stacked
/// system; a tight frame reports (1, 1).
pub fn frame_bounds(fs: &FrameletSystem) -> Result<(f64, f64)> {
    if fs.is_empty() {
        return Err(FrameletError::FilterParam(
            "frame bounds of an empty system".into(),
        ));
    }
    let w = dense_analysis_matrix(fs);
    let gram = w.transpose() * &w;
    let ep = EigenPairs::of_matrix(&gram, false)?;
    Ok((ep.values[0], *ep.values.last().unwrap()))
}

/// Maximum deviation of the weighted level-j quadrature from orthonormality:
/// sum_p w(j,p) u_l(p) u_l'(p) against the identity, over l, l' < ell_max.
/// This is the discrete condition that makes decimated synthesis tight.
pub fn quadrature_check(b: &ChainBasis, j: usize, ell_max: usize) -> Result<f64> {
    let depth = b.chain().depth();
    if j >= depth {
        return Err(FrameletError::LevelOutOfRange {
            level: j,
            lo: 0,
            hi: depth - 1,
        });
    }
    let level_n = b.chain().level(j).n;
    if ell_max > level_n {
        return Err(FrameletError::SizeMismatch {
            what: format!("quadrature index bound at level {j}"),
            expected: level_n,
            got: ell_max,
        });
    }
    let weights: Vec<f64> = (0..level_n).map(|p| b.chain().weight(j, p)).collect();
    let vals: Vec<Vec<f64>> = (0..ell_max).map(|l| b.level_values(l, j)).collect();
    let mut dev = 0.0f64;
    for l in 0..ell_max {
        for lp in l..ell_max {
            let s: f64 = (0..level_n)
                .map(|p| weights[p] * vals[l][p] * vals[lp][p])
                .sum();
            let target = if l == lp { 1.0 } else { 0.0 };
            dev = dev.max((s - target).abs());
        }
    }
    Ok(dev)
}

// ==== undecimated synthesis =================================================

/// Smallest top level J such that the largest spectral value fits inside the
/// plateau of the scale-(2^(J+1)) window, which is what makes the
/// undecimated system terminate in a Parseval identity.
pub fn undecimated_top_level(ep: &EigenPairs, opts: &GeneratorOptions) -> usize {
    let lam_max = ep.values.last().copied().unwrap_or(0.0);
    let mut j = 0usize;
    while lam_max > opts.eps * 2f64.powi(j as i32 + 1) {
        j += 1;
    }
    j
}

/// Expand one undecimated framelet: scale factors are powers of two and the
/// windows are evaluated on the true spectral values, one framelet per
/// vertex with no decimation and no quadrature weight.
pub fn synth_undecimated(
    ep: &EigenPairs,
    opts: &GeneratorOptions,
    j: usize,
    u: usize,
    pass: usize,
) -> Result<Vec<f64>> {
    let n = ep.n();
    if u >= n {
        return Err(FrameletError::NodeOutOfRange { node: u, level: j });
    }
    if pass > opts.r {
        return Err(FrameletError::FilterParam(format!(
            "pass {pass} out of range: {} detail families",
            opts.r
        )));
    }
    let alpha = alpha_window(opts.eps, opts.m)?;
    let gamma = GammaPartition::new(opts.r, opts.m, opts.cuts.as_deref())?;
    let scale = 2f64.powi(j as i32);
    let mut out = vec![0.0; n];
    for l in 0..n {
        let lam = ep.values[l];
        let coef = if pass == 0 {
            alpha.eval(lam / scale)
        } else {
            let a_fine = alpha.eval(lam / (2.0 * scale));
            let a_coarse = alpha.eval(lam / scale);
            let d = (a_fine * a_fine - a_coarse * a_coarse).max(0.0);
            d.sqrt() * gamma.eval(pass - 1, lam / (2.0 * scale))
        };
        if coef == 0.0 {
            continue;
        }
        let w = coef * ep.vectors[(u, l)];
        for (v, o) in out.iter_mut().enumerate() {
            *o += w * ep.vectors[(v, l)];
        }
    }
    Ok(out)
}

/// The undecimated system from level `j1` up to the Parseval top level: every
/// level contributes one low or detail framelet per vertex.
pub fn build_undecimated_system(
    ep: &EigenPairs,
    opts: &GeneratorOptions,
    j1: usize,
) -> Result<FrameletSystem> {
    let top = undecimated_top_level(ep, opts).max(j1);
    let n = ep.n();
    let low = (0..n)
        .into_par_iter()
        .map(|u| synth_undecimated(ep, opts, j1, u, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut high = Vec::new();
    for j in j1..=top {
        let mut fams = Vec::with_capacity(opts.r);
        for pass in 1..=opts.r {
            let rows = (0..n)
                .into_par_iter()
                .map(|u| synth_undecimated(ep, opts, j, u, pass))
                .collect::<Result<Vec<_>>>()?;
            fams.push(rows);
        }
        high.push(fams);
    }
    Ok(FrameletSystem::from_parts(
        SystemKind::Undecimated,
        j1,
        n,
        low,
        high,
    ))
}

// ==== tests =================================================================
