//! Spectral generators and filter banks on the index grid of a chain basis.
//!
//! All sampled quantities live on the grid lambda_l = l - 1 for l = 1..=N
//! (the basis index surrogate). A `GeneratorSet` holds per-level low/high
//! generator samples whose squares telescope exactly between levels; a
//! `FilterBank` holds per-transition filters satisfying the unitary-
//! extension identity |a|^2 + sum |b^(n)|^2 = 1 on their support. Generator
//! sets and filter banks convert into each other by pointwise ratio and
//! product; presets build the bank directly from bump windows in node-count
//! units.

use crate::error::{FrameletError, Result};

// ==== spline polynomial and bump window ====================================

/// P_m(x) = ((1+x)/2)^m * sum_{k=0}^{m-1} C(m-1+k, k) ((1-x)/2)^k.
/// Satisfies the complementarity P_m(x) + P_m(-x) = 1 on [-1, 1].
pub fn spline_poly(m: usize, x: f64) -> Result<f64> {
    if m < 1 {
        return Err(FrameletError::SplineOrder(m));
    }
    let lo = (1.0 - x) / 2.0;
    let hi = (1.0 + x) / 2.0;
    let mut binom = 1.0f64; // C(m-1+k, k), starting at k = 0
    let mut pw = 1.0f64;
    let mut sum = 0.0f64;
    for k in 0..m {
        sum += binom * pw;
        pw *= lo;
        binom *= (m + k) as f64 / (k + 1) as f64;
    }
    Ok(hi.powi(m as i32) * sum)
}

/// A validated bump window: 0 outside [cL-eL, cR+eR], 1 on [cL+eL, cR-eR],
/// a sine rise over (cL-eL, cL+eL) and a cosine fall over (cR-eR, cR+eR],
/// both driven by the degree-m spline polynomial. Continuous everywhere.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub c_l: f64,
    pub c_r: f64,
    pub eps_l: f64,
    pub eps_r: f64,
    pub m: usize,
}

impl Bump {
    pub fn new(c_l: f64, c_r: f64, eps_l: f64, eps_r: f64, m: usize) -> Result<Bump> {
        if m < 1 {
            return Err(FrameletError::SplineOrder(m));
        }
        let ok = c_l < c_r && eps_l > 0.0 && eps_r > 0.0 && eps_l + eps_r <= c_r - c_l;
        if !ok || !(c_l.is_finite() && c_r.is_finite()) {
            return Err(FrameletError::BumpParams {
                c_l,
                c_r,
                eps_l,
                eps_r,
            });
        }
        Ok(Bump {
            c_l,
            c_r,
            eps_l,
            eps_r,
            m,
        })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        // The endpoints land on the zero branch: the transition limits are
        // mathematically 0 there and assigning them avoids cos(pi/2) dust.
        if xi <= self.c_l - self.eps_l || xi >= self.c_r + self.eps_r {
            0.0
        } else if xi < self.c_l + self.eps_l {
            let p = spline_poly(self.m, (xi - self.c_l) / self.eps_l).unwrap();
            (std::f64::consts::FRAC_PI_2 * p).sin()
        } else if xi <= self.c_r - self.eps_r {
            1.0
        } else {
            let p = spline_poly(self.m, (xi - self.c_r) / self.eps_r).unwrap();
            (std::f64::consts::FRAC_PI_2 * p).cos()
        }
    }

    /// Lower end of the support interval.
    pub fn support_lo(&self) -> f64 {
        self.c_l - self.eps_l
    }

    /// Upper end of the support interval.
    pub fn support_hi(&self) -> f64 {
        self.c_r + self.eps_r
    }
}

/// One-shot bump evaluation with per-call validation.
pub fn bump_nu(c_l: f64, c_r: f64, eps_l: f64, eps_r: f64, m: usize, xi: f64) -> Result<f64> {
    Ok(Bump::new(c_l, c_r, eps_l, eps_r, m)?.eval(xi))
}

/// The symmetric window equal to 1 on [-eps, eps], supported on [-1, 1],
/// strictly positive inside (-1, 1), crossing cos(pi/4) at (1+eps)/2.
pub fn alpha_window(eps: f64, m: usize) -> Result<Bump> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FrameletError::FilterParam(format!(
            "scale overlap must lie in (0,1), got {eps}"
        )));
    }
    let c = (1.0 + eps) / 2.0;
    let e = (1.0 - eps) / 2.0;
    Bump::new(-c, c, e, e, m)
}

// ==== high-pass partition ===================================================

/// r windows whose squares partition unity on [0, 1]: consecutive windows
/// meet in complementary sine/cosine transitions of equal width.
#[derive(Debug, Clone)]
pub struct GammaPartition {
    bumps: Vec<Bump>,
}

impl GammaPartition {
    /// Cut points default to n/r with transition half-width 1/(3r); custom
    /// interior cut points (strictly increasing inside (0,1)) may be given.
    pub fn new(r: usize, m: usize, cuts: Option<&[f64]>) -> Result<GammaPartition> {
        if r < 1 {
            return Err(FrameletError::PartitionCuts(
                "need at least one band".into(),
            ));
        }
        let eps = 1.0 / (3.0 * r as f64);
        let mut c: Vec<f64> = match cuts {
            Some(cs) => {
                if cs.len() != r - 1 {
                    return Err(FrameletError::PartitionCuts(format!(
                        "expected {} interior cut points, got {}",
                        r - 1,
                        cs.len()
                    )));
                }
                cs.to_vec()
            }
            None => (1..r).map(|n| n as f64 / r as f64).collect(),
        };
        c.push(1.0 + eps);
        let mut prev = 0.0;
        for (i, &x) in c.iter().enumerate() {
            if x <= prev || (i + 1 < c.len() && x >= 1.0) {
                return Err(FrameletError::PartitionCuts(format!(
                    "cut points must increase inside (0,1), got {c:?}"
                )));
            }
            prev = x;
        }
        let mut bumps = Vec::with_capacity(r);
        bumps.push(Bump::new(-c[0], c[0], eps, eps, m)?);
        for n in 1..r {
            bumps.push(Bump::new(c[n - 1], c[n], eps, eps, m)?);
        }
        Ok(GammaPartition { bumps })
    }

    pub fn r(&self) -> usize {
        self.bumps.len()
    }

    /// Value of band n (0-based) at x.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        self.bumps[n].eval(x)
    }
}

// ==== generator sets ========================================================

/// Per-level generator samples on the shared index grid, coarsest level
/// first. `low` has one vector per level; `high` one list of family vectors
/// per level except the finest. The finest low vector is identically 1
/// (top normalization), so the level telescoping ends in the trivial system.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    sizes: Vec<usize>,
    low: Vec<Vec<f64>>,
    high: Vec<Vec<Vec<f64>>>,
}

impl GeneratorSet {
    /// Wrap explicit samples, validating shapes and the set invariants:
    /// values within [0, 1], exact-to-tolerance nesting between levels, and
    /// unit normalization at the finest level.
    pub fn from_samples(
        sizes: Vec<usize>,
        low: Vec<Vec<f64>>,
        high: Vec<Vec<Vec<f64>>>,
    ) -> Result<GeneratorSet> {
        let depth = sizes.len();
        let n = *sizes.last().ok_or_else(|| {
            FrameletError::InvalidChain("generator set needs at least one level".into())
        })?;
        if low.len() != depth || high.len() + 1 != depth {
            return Err(FrameletError::SizeMismatch {
                what: "generator level count".into(),
                expected: depth,
                got: low.len(),
            });
        }
        for v in low.iter().chain(high.iter().flatten()) {
            if v.len() != n {
                return Err(FrameletError::SizeMismatch {
                    what: "generator grid length".into(),
                    expected: n,
                    got: v.len(),
                });
            }
            if let Some(&bad) = v.iter().find(|x| !(**x >= 0.0 && **x <= 1.0 + 1e-9)) {
                return Err(FrameletError::FilterParam(format!(
                    "generator sample {bad} outside [0,1]"
                )));
            }
        }
        let gs = GeneratorSet { sizes, low, high };
        let rep = check_tightness_generators(&gs);
        if rep.nesting_dev > 1e-9 || rep.norm_dev > 1e-9 {
            return Err(FrameletError::FilterParam(format!(
                "samples violate the generator identities: nesting {:.3e}, \
                 finest-level normalization {:.3e}",
                rep.nesting_dev, rep.norm_dev
            )));
        }
        Ok(gs)
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    pub fn grid_len(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Low-pass samples at level j (coarsest first).
    pub fn low(&self, j: usize) -> &[f64] {
        &self.low[j]
    }

    /// High-pass family samples at level j (absent at the finest level).
    pub fn high(&self, j: usize) -> &[Vec<f64>] {
        &self.high[j]
    }

    /// Number of high-pass families at level j.
    pub fn r(&self, j: usize) -> usize {
        self.high.get(j).map(|h| h.len()).unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorOptions {
    /// High-pass families per refinement.
    pub r: usize,
    /// Plateau fraction of the scale window; each level size must stay below
    /// this fraction of the next finer one.
    pub eps: f64,
    /// Spline smoothness order.
    pub m: usize,
    /// Optional custom interior cut points for the high-pass partition.
    pub cuts: Option<Vec<f64>>,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            r: 1,
            eps: 0.5,
            m: 1,
            cuts: None,
        }
    }
}

/// Sample the scale-window generators for a chain with the given level sizes
/// (coarsest first). Scale factors are the level sizes. The high-pass
/// samples are the square-root differences of consecutive scale windows split
/// by the partition bands; everything is divided pointwise by the finest
/// window so the finest level is identically 1 and the nesting identity is
/// exact on the grid.
pub fn build_generators(sizes: &[usize], opts: &GeneratorOptions) -> Result<GeneratorSet> {
    let depth = sizes.len();
    if depth == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FrameletError::FilterParam(format!(
            "level sizes must be strictly increasing coarsest-first, got {sizes:?}"
        )));
    }
    let alpha = alpha_window(opts.eps, opts.m)?;
    let gamma = GammaPartition::new(opts.r, opts.m, opts.cuts.as_deref())?;
    for (j, w) in sizes.windows(2).enumerate() {
        // The coarser window must plateau over the entire finer support.
        if (w[1] as f64) <= w[0] as f64 / opts.eps {
            return Err(FrameletError::ScalingCondition {
                level: j,
                lo: w[0] as f64,
                hi: w[1] as f64,
                eps: opts.eps,
            });
        }
    }
    let n = *sizes.last().unwrap();
    let grid: Vec<f64> = (0..n).map(|l| l as f64).collect();

    let raw_low: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&nj| grid.iter().map(|&x| alpha.eval(x / nj as f64)).collect())
        .collect();
    let top = raw_low.last().unwrap().clone();
    debug_assert!(top.iter().all(|&x| x > 0.0));

    let mut low: Vec<Vec<f64>> = raw_low
        .iter()
        .map(|v| v.iter().zip(&top).map(|(x, t)| x / t).collect())
        .collect();
    // Snap the finest level to exactly 1.
    if let Some(fin) = low.last_mut() {
        fin.iter_mut().for_each(|x| *x = 1.0);
    }

    let mut high: Vec<Vec<Vec<f64>>> = Vec::with_capacity(depth - 1);
    for j in 0..depth - 1 {
        let scale_next = sizes[j + 1] as f64;
        let fams: Vec<Vec<f64>> = (0..opts.r)
            .map(|band| {
                grid.iter()
                    .enumerate()
                    .map(|(l, &x)| {
                        let d = (raw_low[j + 1][l] * raw_low[j + 1][l]
                            - raw_low[j][l] * raw_low[j][l])
                            .max(0.0);
                        d.sqrt() * gamma.eval(band, x / scale_next) / top[l]
                    })
                    .collect()
            })
            .collect();
        high.push(fams);
    }

    GeneratorSet::from_samples(sizes.to_vec(), low, high)
}

// ==== filter banks ==========================================================

/// Filters for one refinement transition: `low` takes the finer level's
/// coefficients toward the coarser level, each `high` vector produces one
/// detail family. Samples cover the full shared grid.
#[derive(Debug, Clone)]
pub struct Transition {
    pub low: Vec<f64>,
    pub high: Vec<Vec<f64>>,
}

/// Per-transition filters for a chain, coarsest transition first:
/// `transition(t)` maps level t+1 to level t. The declared support of
/// transition t is the finer level size.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub(crate) sizes: Vec<usize>,
    pub(crate) transitions: Vec<Transition>,
}

impl FilterBank {
    pub fn level_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition(&self, t: usize) -> &Transition {
        &self.transitions[t]
    }

    /// Support cutoff of transition t: indices l < this are in-band.
    pub fn support(&self, t: usize) -> usize {
        self.sizes[t + 1]
    }

    /// High-pass family count of transition t.
    pub fn r(&self, t: usize) -> usize {
        self.transitions[t].high.len()
    }
}

/// Filters from generators: the transition-t low filter is the ratio of the
/// coarser to the finer low generator on the finer support (zero outside),
/// and each high filter is the corresponding high generator divided by the
/// finer low generator. Denominators smaller than 1e-14 inside the support
/// are an error rather than silently zeroed.
pub fn derive_filter_bank(gs: &GeneratorSet) -> Result<FilterBank> {
    let n = gs.grid_len();
    let depth = gs.depth();
    let mut transitions = Vec::with_capacity(depth.saturating_sub(1));
    for t in 0..depth.saturating_sub(1) {
        let denom = gs.low(t + 1);
        let mut low = vec![0.0; n];
        let mut high = vec![vec![0.0; n]; gs.r(t)];
        for l in 0..n {
            if denom[l] == 0.0 {
                continue;
            }
            if denom[l].abs() < 1e-14 {
                return Err(FrameletError::DivisionThreshold {
                    level: t + 1,
                    index: l + 1,
                    value: denom[l],
                });
            }
            low[l] = gs.low(t)[l] / denom[l];
            for (f, fam) in gs.high(t).iter().enumerate() {
                high[f][l] = fam[l] / denom[l];
            }
        }
        transitions.push(Transition { low, high });
    }
    Ok(FilterBank {
        sizes: gs.level_sizes().to_vec(),
        transitions,
    })
}

/// Generators from filters: the finest low generator is identically 1 and
/// each coarser sample is the running product of transition filters. This is
/// the exact inverse of `derive_filter_bank` and gives preset banks a
/// generator family for dense synthesis.
pub fn generators_from_filters(fb: &FilterBank) -> Result<GeneratorSet> {
    let n = *fb.level_sizes().last().unwrap();
    let depth = fb.depth();
    let mut low = vec![vec![1.0; n]; depth];
    let mut high: Vec<Vec<Vec<f64>>> = vec![Vec::new(); depth - 1];
    for t in (0..depth - 1).rev() {
        let tr = fb.transition(t);
        low[t] = (0..n)
            .map(|l| tr.low.get(l).copied().unwrap_or(0.0) * low[t + 1][l])
            .collect();
        high[t] = tr
            .high
            .iter()
            .map(|b| (0..n).map(|l| b[l] * low[t + 1][l]).collect())
            .collect();
    }
    GeneratorSet::from_samples(fb.level_sizes().to_vec(), low, high)
}

#[derive(Debug, Clone)]
pub struct PresetOptions {
    pub zeta_a: f64,
    pub zeta_b1: f64,
    pub zeta_b2: f64,
    pub m: usize,
    /// Divide each grid point's filter vector by its norm (where positive),
    /// forcing the unitary-extension identity exactly. Default on.
    pub normalize: bool,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            zeta_a: 0.25,
            zeta_b1: 0.25,
            zeta_b2: 0.25,
            m: 1,
            normalize: true,
        }
    }
}

/// Named bump-window filter banks with 1, 2, or 3 high passes per
/// transition, parameterized in node-count units and evaluated directly at
/// the index grid. The low-pass band always ends at the coarser level size,
/// so decimation drops exactly the out-of-band indices.
pub fn preset_filter_bank(
    sizes: &[usize],
    n_high: usize,
    opts: &PresetOptions,
) -> Result<FilterBank> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FrameletError::FilterParam(format!(
            "level sizes must be strictly increasing coarsest-first, got {sizes:?}"
        )));
    }
    if !(1..=3).contains(&n_high) {
        return Err(FrameletError::FilterParam(format!(
            "presets provide 1, 2, or 3 high passes, got {n_high}"
        )));
    }
    for (name, z) in [
        ("zeta_a", opts.zeta_a),
        ("zeta_b1", opts.zeta_b1),
        ("zeta_b2", opts.zeta_b2),
    ] {
        if !(z > 0.0 && z < 0.5) {
            return Err(FrameletError::FilterParam(format!(
                "{name} must lie in (0, 0.5), got {z}"
            )));
        }
    }
    let n = *sizes.last().unwrap();
    let m = opts.m;
    let mut transitions = Vec::new();
    for t in 0..sizes.len() - 1 {
        let nc = sizes[t] as f64; // coarser
        let nf = sizes[t + 1] as f64; // finer
        let c_ra = 0.5 * nc * (1.0 + opts.zeta_a);
        let e_ra = nc - c_ra;
        let low_bump = Bump::new(-c_ra, c_ra, e_ra, e_ra, m)?;
        let mut highs: Vec<Bump> = Vec::new();
        match n_high {
            1 => {
                highs.push(Bump::new(c_ra, 2.0 * nf, e_ra, nf / 4.0, m)?);
            }
            2 => {
                let c_rb1 = 2.0 * (nf + nc) * opts.zeta_b1;
                let e_rb1 = nf - c_rb1;
                highs.push(Bump::new(c_ra, c_rb1, e_ra, e_rb1, m)?);
                highs.push(Bump::new(c_rb1, 2.0 * nf, e_rb1, 1.0, m)?);
            }
            3 => {
                let anchors = [nc, nc + 0.3 * (nf - nc), nc + 0.8 * (nf - nc)];
                let zetas = [opts.zeta_b1, opts.zeta_b2];
                let mut prev_c = c_ra;
                let mut prev_e = e_ra;
                for b in 0..2 {
                    let c_r = 0.5 * (anchors[b + 1] + anchors[b])
                        + 0.5 * zetas[b] * (anchors[b + 1] - anchors[b]);
                    let e_r = anchors[b + 1] - c_r;
                    highs.push(Bump::new(prev_c, c_r, prev_e, e_r, m)?);
                    prev_c = c_r;
                    prev_e = e_r;
                }
                highs.push(Bump::new(prev_c, 2.0 * nf, prev_e, 1.0, m)?);
            }
            _ => unreachable!(),
        }
        let mut low: Vec<f64> = (0..n).map(|l| low_bump.eval(l as f64)).collect();
        let mut high: Vec<Vec<f64>> = highs
            .iter()
            .map(|b| (0..n).map(|l| b.eval(l as f64)).collect())
            .collect();
        if opts.normalize {
            for l in 0..n {
                let mut norm = low[l] * low[l];
                for h in &high {
                    norm += h[l] * h[l];
                }
                if norm > 0.0 {
                    let s = norm.sqrt();
                    low[l] /= s;
                    for h in high.iter_mut() {
                        h[l] /= s;
                    }
                }
            }
        }
        transitions.push(Transition { low, high });
    }
    Ok(FilterBank {
        sizes: sizes.to_vec(),
        transitions,
    })
}

// ==== tightness checks ======================================================

/// Maximum deviations of the three tightness identities.
#[derive(Debug, Clone, Copy)]
pub struct TightnessReport {
    /// Unitary-extension identity per transition.
    pub uep_dev: f64,
    /// Level-to-level telescoping of squared generators.
    pub nesting_dev: f64,
    /// Unit normalization at the finest level.
    pub norm_dev: f64,
}

impl TightnessReport {
    pub fn max(&self) -> f64 {
        self.uep_dev.max(self.nesting_dev).max(self.norm_dev)
    }
}

/// Evaluate the unitary-extension identity of a filter bank on every
/// in-support grid point of each transition, plus any out-of-support points
/// where the bank is still nonzero (presets leave tails there; normalization
/// flattens them). The nesting and normalization figures refer to the
/// generator family reconstructed from the filters; when that reconstruction
/// is impossible they are reported as infinite.
pub fn check_tightness(fb: &FilterBank) -> TightnessReport {
    let mut uep_dev = 0.0f64;
    for t in 0..fb.n_transitions() {
        let tr = fb.transition(t);
        let support = fb.support(t);
        for l in 0..tr.low.len() {
            let mut norm = tr.low[l] * tr.low[l];
            for h in &tr.high {
                norm += h[l] * h[l];
            }
            if l < support || norm > 0.0 {
                uep_dev = uep_dev.max((norm - 1.0).abs());
            }
        }
    }
    match generators_from_filters(fb) {
        Ok(gs) => {
            let rep = check_tightness_generators(&gs);
            TightnessReport {
                uep_dev,
                nesting_dev: rep.nesting_dev,
                norm_dev: rep.norm_dev,
            }
        }
        Err(_) => TightnessReport {
            uep_dev,
            nesting_dev: f64::INFINITY,
            norm_dev: f64::INFINITY,
        },
    }
}

/// Evaluate the generator identities directly: nesting between consecutive
/// levels on the whole grid and unit normalization at the finest level. The
/// unitary-extension figure is that of the derived filter bank (infinite if
/// the bank cannot be derived).
pub fn check_tightness_generators(gs: &GeneratorSet) -> TightnessReport {
    let n = gs.grid_len();
    let mut nesting_dev = 0.0f64;
    for j in 0..gs.depth().saturating_sub(1) {
        for l in 0..n {
            let mut sum = gs.low(j)[l] * gs.low(j)[l];
            for fam in gs.high(j) {
                sum += fam[l] * fam[l];
            }
            let next = gs.low(j + 1)[l] * gs.low(j + 1)[l];
            nesting_dev = nesting_dev.max((sum - next).abs());
        }
    }
    let norm_dev = gs
        .low(gs.depth() - 1)
        .iter()
        .map(|x| (x * x - 1.0).abs())
        .fold(0.0, f64::max);
    let uep_dev = match derive_filter_bank(gs) {
        Ok(fb) => {
            let mut dev = 0.0f64;
            for t in 0..fb.n_transitions() {
                let tr = fb.transition(t);
                for l in 0..fb.support(t) {
                    let mut norm = tr.low[l] * tr.low[l];
                    for h in &tr.high {
                        norm += h[l] * h[l];
                    }
                    dev = dev.max((norm - 1.0).abs());
                }
            }
            dev
        }
        Err(_) => f64::INFINITY,
    };
    TightnessReport {
        uep_dev,
        nesting_dev,
        norm_dev,
    }
}

// ==== tests =================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spline_poly_examples() {
        assert_abs_diff_eq!(spline_poly(1, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(spline_poly(2, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        for m in 1..=4 {
            assert_abs_diff_eq!(spline_poly(m, 1.0).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(spline_poly(m, -1.0).unwrap(), 0.0, epsilon = 1e-14);
        }
        assert!(spline_poly(0, 0.3).is_err());
    }

    #[test]
    fn spline_poly_complementarity_grid() {
        for m in 1..=3 {
            let mut worst = 0.0f64;
            for i in 0..1000 {
                let x = -1.0 + 2.0 * i as f64 / 999.0;
                let s = spline_poly(m, x).unwrap() + spline_poly(m, -x).unwrap();
                worst = worst.max((s - 1.0).abs());
            }
            assert!(worst <= 1e-13, "m={m}: {worst:.3e}");
        }
    }

    #[test]
    fn bump_branches_and_examples() {
        let b = Bump::new(2.0, 6.0, 1.0, 2.0, 1).unwrap();
        assert_abs_diff_eq!(b.eval(0.9), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(b.eval(3.5), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(
            b.eval(6.0),
            (std::f64::consts::FRAC_PI_4).cos(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(b.eval(8.1), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(b.eval(2.0), (std::f64::consts::FRAC_PI_4).sin(), epsilon = 1e-14);
    }

    #[test]
    fn bump_continuity_at_breakpoints() {
        for m in 1..=3 {
            let b = Bump::new(1.0, 5.0, 0.75, 1.5, m).unwrap();
            for x in [
                b.c_l - b.eps_l,
                b.c_l + b.eps_l,
                b.c_r - b.eps_r,
                b.c_r + b.eps_r,
            ] {
                let lo = b.eval(x - 1e-9);
                let mid = b.eval(x);
                let hi = b.eval(x + 1e-9);
                assert!((lo - mid).abs() <= 1e-8 && (hi - mid).abs() <= 1e-8);
            }
            // Exact branch agreement at the left plateau edge.
            let p = spline_poly(m, 1.0).unwrap();
            assert_abs_diff_eq!(
                (std::f64::consts::FRAC_PI_2 * p).sin(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn bump_rejects_bad_params() {
        assert!(Bump::new(3.0, 2.0, 0.5, 0.5, 1).is_err());
        assert!(Bump::new(0.0, 1.0, 0.0, 0.5, 1).is_err());
        assert!(Bump::new(0.0, 1.0, 0.8, 0.8, 1).is_err());
        assert!(Bump::new(0.0, 1.0, 0.5, 0.5, 0).is_err());
    }

    #[test]
    fn alpha_window_shape() {
        let a = alpha_window(0.5, 1).unwrap();
        assert_abs_diff_eq!(a.eval(0.0), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a.eval(0.5), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a.eval(-0.3), a.eval(0.3), epsilon = 1e-15);
        assert_abs_diff_eq!(
            a.eval(0.75),
            (std::f64::consts::FRAC_PI_4).cos(),
            epsilon = 1e-14
        );
        assert!(a.eval(0.999) > 0.0);
        assert_abs_diff_eq!(a.eval(1.0001), 0.0, epsilon = 0.0);
        assert!(alpha_window(0.0, 1).is_err());
        assert!(alpha_window(1.0, 1).is_err());
    }

    #[test]
    fn gamma_partition_of_unity() {
        for r in 1..=4 {
            let g = GammaPartition::new(r, 1, None).unwrap();
            for i in 0..=500 {
                let x = i as f64 / 500.0;
                let sum: f64 = (0..r).map(|n| g.eval(n, x).powi(2)).sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-13);
            }
        }
        let g1 = GammaPartition::new(1, 2, None).unwrap();
        for i in 0..=10 {
            assert_abs_diff_eq!(g1.eval(0, i as f64 / 10.0), 1.0, epsilon = 0.0);
        }
    }

    #[test]
    fn gamma_rejects_bad_cuts() {
        assert!(GammaPartition::new(0, 1, None).is_err());
        assert!(GammaPartition::new(3, 1, Some(&[0.6, 0.4])).is_err());
        assert!(GammaPartition::new(2, 1, Some(&[1.2])).is_err());
    }

    #[test]
    fn generators_satisfy_identities() {
        let sizes = [8, 40, 100, 250, 500];
        for r in [1, 3] {
            let gs = build_generators(
                &sizes,
                &GeneratorOptions {
                    r,
                    eps: 0.6,
                    ..Default::default()
                },
            )
            .unwrap();
            let rep = check_tightness_generators(&gs);
            assert!(rep.nesting_dev <= 1e-12, "r={r}: {:.3e}", rep.nesting_dev);
            assert!(rep.norm_dev <= 1e-12);
            assert!(rep.uep_dev <= 1e-12, "r={r}: {:.3e}", rep.uep_dev);
        }
    }

    #[test]
    fn generator_high_supports_are_interior() {
        let sizes = [8, 40, 100, 250, 500];
        let gs = build_generators(
            &sizes,
            &GeneratorOptions {
                r: 3,
                eps: 0.6,
                ..Default::default()
            },
        )
        .unwrap();
        for j in 0..gs.depth() - 1 {
            for fam in gs.high(j) {
                let first = fam.iter().position(|&x| x != 0.0);
                let last = fam.iter().rposition(|&x| x != 0.0);
                if let (Some(first), Some(last)) = (first, last) {
                    assert!(first > 0, "level {j}: support touches the origin");
                    assert!(last < gs.level_sizes()[j + 1]);
                }
            }
            // The low generator vanishes beyond the level size (truncation).
            for (l, &x) in gs.low(j).iter().enumerate() {
                if l >= gs.level_sizes()[j] {
                    assert_abs_diff_eq!(x, 0.0, epsilon = 0.0);
                }
            }
        }
    }

    #[test]
    fn scaling_condition_is_strict() {
        let err = build_generators(&[250, 500], &GeneratorOptions::default());
        assert!(matches!(
            err,
            Err(FrameletError::ScalingCondition { .. })
        ));
        assert!(build_generators(&[240, 500], &GeneratorOptions::default()).is_ok());
    }

    fn toy_generators() -> GeneratorSet {
        let t = toy::generator_tables();
        GeneratorSet::from_samples(vec![1, 2, 3, 6], t.low, t.high).unwrap()
    }

    #[test]
    fn reference_tables_derive_an_exact_bank() {
        let gs = toy_generators();
        let fb = derive_filter_bank(&gs).unwrap();
        let rep = check_tightness(&fb);
        assert!(rep.max() <= 1e-12, "{rep:?}");
        // The finest transition keeps the generator values verbatim.
        let tr = fb.transition(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(tr.low[2], h, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.high[0][3], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tr.high[1][5], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn filters_and_generators_round_trip() {
        let sizes = [8, 40, 100, 250, 500];
        let gs = build_generators(
            &sizes,
            &GeneratorOptions {
                r: 2,
                eps: 0.6,
                ..Default::default()
            },
        )
        .unwrap();
        let fb = derive_filter_bank(&gs).unwrap();
        let back = generators_from_filters(&fb).unwrap();
        for j in 0..gs.depth() {
            for l in 0..gs.grid_len() {
                assert_abs_diff_eq!(back.low(j)[l], gs.low(j)[l], epsilon = 1e-12);
            }
        }
        for j in 0..gs.depth() - 1 {
            for (a, b) in gs.high(j).iter().zip(back.high(j)) {
                for l in 0..gs.grid_len() {
                    assert_abs_diff_eq!(b[l], a[l], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_level_bank_is_empty() {
        let gs = GeneratorSet::from_samples(vec![4], vec![vec![1.0; 4]], vec![]).unwrap();
        let fb = derive_filter_bank(&gs).unwrap();
        assert_eq!(fb.n_transitions(), 0);
        assert_eq!(check_tightness(&fb).uep_dev, 0.0);
    }

    #[test]
    fn preset_one_high_matches_band_formulas() {
        let fb = preset_filter_bank(&[250, 500], 1, &PresetOptions::default()).unwrap();
        let tr = fb.transition(0);
        // Low pass: plateau through 62.5, zero from 250 on.
        assert_abs_diff_eq!(tr.low[62], 1.0, epsilon = 1e-12);
        assert!(tr.low[100] > 0.0 && tr.low[100] < 1.0);
        for l in 250..500 {
            assert_abs_diff_eq!(tr.low[l], 0.0, epsilon = 0.0);
        }
        // High pass vanishes through 62.5 and is positive just above.
        for l in 0..=62 {
            assert_abs_diff_eq!(tr.high[0][l], 0.0, epsilon = 0.0);
        }
        assert!(tr.high[0][63] > 0.0);
    }

    #[test]
    fn normalized_presets_are_exactly_tight() {
        let sizes = [40, 100, 250, 500];
        for n_high in 1..=3 {
            let fb = preset_filter_bank(&sizes, n_high, &PresetOptions::default()).unwrap();
            let rep = check_tightness(&fb);
            assert!(
                rep.uep_dev <= 1e-12,
                "{n_high} high: uep {:.3e}",
                rep.uep_dev
            );
        }
    }

    #[test]
    fn unnormalized_three_high_deviates() {
        let sizes = [8, 40, 100, 250, 500];
        let fb = preset_filter_bank(
            &sizes,
            3,
            &PresetOptions {
                normalize: false,
                ..Default::default()
            },
        )
        .unwrap();
        let rep = check_tightness(&fb);
        assert!(rep.uep_dev > 1e-6, "uep {:.3e}", rep.uep_dev);
    }

    #[test]
    fn unnormalized_presets_stay_tight_in_band() {
        // The rough tails live beyond the finer level size; the in-band
        // identity is exact by the complementary window construction.
        let sizes = [40, 100, 250, 500];
        for n_high in 1..=3 {
            let fb = preset_filter_bank(
                &sizes,
                n_high,
                &PresetOptions {
                    normalize: false,
                    ..Default::default()
                },
            )
            .unwrap();
            let mut dev = 0.0f64;
            for t in 0..fb.n_transitions() {
                let tr = fb.transition(t);
                for l in 0..fb.support(t) {
                    let mut norm = tr.low[l] * tr.low[l];
                    for h in &tr.high {
                        norm += h[l] * h[l];
                    }
                    dev = dev.max((norm - 1.0).abs());
                }
            }
            assert!(dev <= 1e-12, "{n_high} high in-band dev {dev:.3e}");
        }
    }

    #[test]
    fn preset_rejects_bad_parameters() {
        assert!(preset_filter_bank(&[250, 500], 4, &PresetOptions::default()).is_err());
        assert!(preset_filter_bank(&[500, 250], 1, &PresetOptions::default()).is_err());
        let bad_zeta = PresetOptions {
            zeta_a: 0.7,
            ..Default::default()
        };
        assert!(preset_filter_bank(&[250, 500], 1, &bad_zeta).is_err());
        // A two-high middle window needs its crossing at or past the band
        // midpoint; smaller values leave no room for the plateau.
        let tight_zeta = PresetOptions {
            zeta_b1: 0.2,
            ..Default::default()
        };
        assert!(matches!(
            preset_filter_bank(&[250, 500], 2, &tight_zeta),
            Err(FrameletError::BumpParams { .. })
        ));
    }

    #[test]
    fn all_zero_bank_reports_full_deviation() {
        let fb = FilterBank {
            sizes: vec![2, 4],
            transitions: vec![Transition {
                low: vec![0.0; 4],
                high: vec![vec![0.0; 4]],
            }],
        };
        let rep = check_tightness(&fb);
        assert_abs_diff_eq!(rep.uep_dev, 1.0, epsilon = 0.0);
    }

    #[test]
    fn toy_chain_generators_need_wide_overlap() {
        // Level ratios up to 2/3 require the plateau fraction above 2/3.
        assert!(build_generators(
            &[1, 2, 3, 6],
            &GeneratorOptions {
                eps: 0.5,
                ..Default::default()
            }
        )
        .is_err());
        let gs = build_generators(
            &[1, 2, 3, 6],
            &GeneratorOptions {
                eps: 0.75,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(check_tightness_generators(&gs).max() <= 1e-12);
    }
}
