//! Command-line driver for the framelet pipeline: chain construction,
//! basis construction and verification, fast transforms with optional dense
//! oracle checks, complexity benchmarks, the worked-example golden run, and
//! multiresolution coefficient dumps.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O or parse failure.

#![forbid(unsafe_code)]

mod demo;

use clap::{Args, Parser, Subcommand, ValueEnum};
use framelet::bench::{run_bench, BenchOptions};
use framelet::io;
use framelet::{
    basis_id, build_chain, build_generators, chain_id, decompose, derive_filter_bank,
    filter_bank_id, generators_from_filters, honbc, onbc, preset_filter_bank, quadrature_check,
    reconstruct, toy, verify_chain_basis, BasisKind, ChainBasis, Coefficients, FilterBank,
    FrameletError, GeneratorOptions, PresetOptions,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "framelet", version, about = "Decimated tight framelet transforms on graphs")]
struct Cli {
    /// Worker thread count for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a coarse-grained chain from a graph file.
    Chain(ChainArgs),
    /// Build a chain-adapted orthonormal basis and verify it.
    Basis(BasisArgs),
    /// Fast multi-level framelet transforms.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Re-check stored artifacts: basis orthonormality, filter tightness.
    Verify(VerifyArgs),
    /// Transform complexity benchmark on random dense graphs.
    Bench(BenchArgs),
    /// Golden run of the worked six-vertex example.
    DemoToy,
    /// Multiresolution decomposition with per-level CSV dumps.
    Mra(MraArgs),
}

#[derive(Args)]
struct ChainArgs {
    /// Graph file: TSV edge list, or .json document.
    #[arg(long)]
    graph: PathBuf,
    /// Cluster counts per coarsening, finest step first (e.g. 48,18,6).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the worked example's fixed medoid centers (six-vertex graph,
    /// sizes 3,2,1 only).
    #[arg(long)]
    toy_centers: bool,
    /// Output bundle path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Haar,
    Laplacian,
}

#[derive(Args)]
struct BasisArgs {
    /// Chain bundle from `chain`.
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Output bundle path (omit to only verify).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TransformCmd {
    /// Decompose a vertex signal into framelet coefficients.
    Decompose(DecomposeArgs),
    /// Reconstruct a vertex signal from framelet coefficients.
    Reconstruct(ReconstructArgs),
}

#[derive(Args)]
struct FilterTuning {
    /// Filter bank: preset:1high, preset:2high, preset:3high, or
    /// generator:rK (K high passes from nested generators).
    #[arg(long)]
    filter: String,
    /// Divide preset filters by the bank norm so tightness is exact.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    normalize_filters: OnOff,
    /// Low-pass transition shape parameter.
    #[arg(long, default_value_t = 0.25)]
    zeta_a: f64,
    /// First high-pass transition shape parameter.
    #[arg(long, default_value_t = 0.25)]
    zeta_b1: f64,
    /// Second high-pass transition shape parameter.
    #[arg(long, default_value_t = 0.25)]
    zeta_b2: f64,
    /// Smoothness order of the spline transition windows.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Transition width for generator banks; shallow chains need a wider
    /// window (the six-vertex example wants 0.75).
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Bundle holding the chain and basis.
    #[arg(long)]
    basis: PathBuf,
    #[command(flatten)]
    tuning: FilterTuning,
    /// Input signal CSV (node,value).
    #[arg(long)]
    signal: PathBuf,
    /// Coarsest level of the decomposition.
    #[arg(long = "J1", default_value_t = 0)]
    j1: usize,
    /// Also run the dense oracle and print the largest block deviation.
    #[arg(long)]
    verify: bool,
    /// Store coefficient values in a binary sidecar next to the bundle.
    #[arg(long)]
    binary: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Bundle holding the chain and basis.
    #[arg(long)]
    basis: PathBuf,
    #[command(flatten)]
    tuning: FilterTuning,
    /// Coefficients bundle from `transform decompose`.
    #[arg(long)]
    coefficients: PathBuf,
    /// Also run the dense oracle and print the largest vertex deviation.
    #[arg(long)]
    verify: bool,
    /// Output signal CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Bundle holding the chain and basis.
    #[arg(long)]
    basis: PathBuf,
    /// Optional filter spec to check tightness and quadrature for.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    normalize_filters: OnOff,
    #[arg(long, default_value_t = 0.25)]
    zeta_a: f64,
    #[arg(long, default_value_t = 0.25)]
    zeta_b1: f64,
    #[arg(long, default_value_t = 0.25)]
    zeta_b2: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    Counts,
    Walltime,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph sizes to benchmark, ascending (e.g. 500,1000,2000).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Fraction of nodes kept per coarsening.
    #[arg(long, default_value_t = 0.4)]
    retention: f64,
    /// Transform repetitions per graph.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which fitted slope to headline; the CSV always carries both counts
    /// and times.
    #[arg(long, value_enum, default_value_t = BenchMode::Counts)]
    mode: BenchMode,
    /// Output CSV path (omit to print records only).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MraArgs {
    /// Graph file: TSV edge list, or .json document.
    #[arg(long)]
    graph: PathBuf,
    /// Input signal CSV (node,value).
    #[arg(long)]
    signal: PathBuf,
    /// Cluster counts per coarsening, finest step first.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: FilterTuning,
    /// Coarsest level of the decomposition.
    #[arg(long = "J1", default_value_t = 0)]
    j1: usize,
    /// Directory for the per-level CSVs (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
}

// ==== helpers ===============================================================

fn build_filter_bank(sizes: &[usize], t: &FilterTuning) -> Result<FilterBank, FrameletError> {
    let spec = t.filter.trim();
    if let Some(rest) = spec.strip_prefix("preset:") {
        let n_high = match rest {
            "1high" => 1,
            "2high" => 2,
            "3high" => 3,
            other => {
                return Err(FrameletError::Parse(format!(
                    "unknown preset '{other}' (expected 1high, 2high, or 3high)"
                )));
            }
        };
        preset_filter_bank(
            sizes,
            n_high,
            &PresetOptions {
                zeta_a: t.zeta_a,
                zeta_b1: t.zeta_b1,
                zeta_b2: t.zeta_b2,
                m: t.m,
                normalize: t.normalize_filters == OnOff::On,
            },
        )
    } else if let Some(rest) = spec.strip_prefix("generator:r") {
        let r: usize = rest.parse().map_err(|e| {
            FrameletError::Parse(format!("bad high-pass count in 'generator:r{rest}': {e}"))
        })?;
        let gs = build_generators(
            sizes,
            &GeneratorOptions {
                r,
                m: t.m,
                eps: t.eps,
                ..GeneratorOptions::default()
            },
        )?;
        derive_filter_bank(&gs)
    } else {
        Err(FrameletError::Parse(format!(
            "filter spec '{spec}' must be preset:{{1,2,3}}high or generator:rK"
        )))
    }
}

fn bank_for(b: &ChainBasis, t: &FilterTuning) -> Result<FilterBank, FrameletError> {
    build_filter_bank(&b.chain().sizes(), t)
}

/// Dense analysis rows of the full framelet system the coefficients of
/// which `decompose` computes; used by the `--verify` oracle paths.
fn dense_rows(
    fb: &FilterBank,
    b: &ChainBasis,
    j1: usize,
) -> Result<Vec<Vec<f64>>, FrameletError> {
    let gs = generators_from_filters(fb)?;
    let fs = framelet::build_framelet_system(b, &gs, j1)?;
    Ok(fs.rows().map(|r| r.to_vec()).collect())
}

fn coefficient_values(co: &Coefficients) -> Vec<f64> {
    co.blocks().flatten().copied().collect()
}

/// Smallest original-vertex id inside each cluster of a level; ties the
/// coefficient CSVs to plottable vertices.
fn representatives(b: &ChainBasis, level: usize) -> Vec<usize> {
    let chain = b.chain();
    let mut rep = vec![usize::MAX; chain.level(level).n];
    for v in 0..chain.n() {
        let p = chain.ancestor(level, v);
        rep[p] = rep[p].min(v);
    }
    rep
}

fn write_block_csv(
    path: &Path,
    reps: &[usize],
    values: &[f64],
) -> Result<(), FrameletError> {
    let mut out = String::from("node,rep,value\n");
    for (p, (&r, x)) in reps.iter().zip(values).enumerate() {
        out.push_str(&format!("{p},{r},{x}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

// ==== subcommand bodies =====================================================

fn cmd_chain(a: &ChainArgs) -> Result<(), FrameletError> {
    let g = io::load_graph(&a.graph)?;
    let centers = a.toy_centers.then(toy::centers);
    let chain = build_chain(&g, &a.sizes, a.seed, centers.as_deref())?;
    let mut sizes = chain.sizes();
    sizes.reverse();
    let shown: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    println!("level sizes (finest first): {}", shown.join(", "));
    let mut bundle = io::ArtifactBundle::new();
    bundle.chain = Some(io::chain_to_manifest(&chain)?);
    io::save_bundle(&a.out, &bundle)?;
    println!("chain written to {}", a.out.display());
    Ok(())
}

fn load_chain_bundle(path: &Path) -> Result<(io::ArtifactBundle, framelet::Chain), FrameletError> {
    let bundle = io::load_bundle(path)?;
    let manifest = bundle
        .chain
        .as_ref()
        .ok_or_else(|| FrameletError::Parse("bundle has no chain manifest".into()))?;
    let chain = io::chain_from_manifest(manifest)?;
    Ok((bundle, chain))
}

fn cmd_basis(a: &BasisArgs) -> Result<(), FrameletError> {
    let (bundle, chain) = load_chain_bundle(&a.chain)?;
    let basis = match a.kind {
        KindArg::Haar => honbc(&chain)?,
        KindArg::Laplacian => onbc(&chain)?,
    };
    let report = verify_chain_basis(&basis);
    println!("gram deviation: {:.3e}", report.max_gram_dev);
    println!(
        "constancy deviation: {:.3e}",
        report.constancy_dev.iter().fold(0.0f64, |m, &d| m.max(d))
    );
    println!(
        "restricted orthonormality deviation: {:.3e}",
        report.restriction_dev.iter().fold(0.0f64, |m, &d| m.max(d))
    );
    if basis.kind() == BasisKind::Haar {
        let max_spoc = basis.spoc_counts().iter().copied().max().unwrap_or(0);
        println!("max spoc: {max_spoc}");
    }
    if let Some(out) = &a.out {
        let mut out_bundle = io::ArtifactBundle::new();
        out_bundle.chain = bundle.chain.clone();
        out_bundle.basis = Some(io::basis_to_payload(&basis));
        io::save_bundle(out, &out_bundle)?;
        println!("basis written to {}", out.display());
    }
    let dev = report.max_deviation();
    if dev > 1e-8 {
        return Err(FrameletError::BasisConstruction {
            level: 0,
            reason: format!("verification deviation {dev:.3e} exceeds 1e-8"),
        });
    }
    Ok(())
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<(), FrameletError> {
    let bundle = io::load_bundle(&a.basis)?;
    let basis = io::basis_from_bundle(&bundle)?;
    let fb = bank_for(&basis, &a.tuning)?;
    let f = io::load_signal(&a.signal)?;
    let co = decompose(&fb, &basis, &f, a.j1)?;
    let energy: f64 = co.energy();
    println!("start level: {}", co.start_level());
    println!(
        "blocks: 1 low ({}) + {} detail levels",
        co.low().len(),
        co.n_detail_levels()
    );
    println!("coefficient energy: {energy:.6}");
    if a.verify {
        let rows = dense_rows(&fb, &basis, a.j1)?;
        let flat = coefficient_values(&co);
        let mut dev = 0.0f64;
        for (i, row) in rows.iter().enumerate() {
            let dense: f64 = row.iter().zip(&f).map(|(r, x)| r * x).sum();
            dev = dev.max((flat[i] - dense).abs());
        }
        println!("dense oracle deviation: {dev:.3e}");
        if dev > 1e-9 {
            return Err(FrameletError::FilterParam(format!(
                "fast/dense disagreement {dev:.3e} exceeds 1e-9"
            )));
        }
    }
    io::save_coefficients(&a.out, &co, a.binary)?;
    println!("coefficients written to {}", a.out.display());
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<(), FrameletError> {
    let bundle = io::load_bundle(&a.basis)?;
    let basis = io::basis_from_bundle(&bundle)?;
    let fb = bank_for(&basis, &a.tuning)?;
    let co = io::load_coefficients(&a.coefficients)?;
    let f = reconstruct(&fb, &basis, &co)?;
    if a.verify {
        let rows = dense_rows(&fb, &basis, co.start_level())?;
        let flat = coefficient_values(&co);
        let mut dev = 0.0f64;
        for v in 0..f.len() {
            let dense: f64 = rows.iter().zip(&flat).map(|(row, c)| c * row[v]).sum();
            dev = dev.max((f[v] - dense).abs());
        }
        println!("dense oracle deviation: {dev:.3e}");
        if dev > 1e-9 {
            return Err(FrameletError::FilterParam(format!(
                "fast/dense disagreement {dev:.3e} exceeds 1e-9"
            )));
        }
    }
    io::save_signal(&a.out, &f)?;
    println!("signal written to {}", a.out.display());
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), FrameletError> {
    let bundle = io::load_bundle(&a.basis)?;
    let basis = io::basis_from_bundle(&bundle)?;
    let report = verify_chain_basis(&basis);
    println!("basis deviation: {:.3e}", report.max_deviation());
    let mut worst = report.max_deviation();
    if let Some(spec) = &a.filter {
        let tuning = FilterTuning {
            filter: spec.clone(),
            normalize_filters: a.normalize_filters,
            zeta_a: a.zeta_a,
            zeta_b1: a.zeta_b1,
            zeta_b2: a.zeta_b2,
            m: a.m,
            eps: a.eps,
        };
        let fb = build_filter_bank(&basis.chain().sizes(), &tuning)?;
        let tight = framelet::check_tightness(&fb);
        println!("filter tightness deviation: {:.3e}", tight.max());
        worst = worst.max(tight.max());
        let mut quad = 0.0f64;
        for j in 0..basis.chain().depth() {
            quad = quad.max(quadrature_check(&basis, j, basis.chain().level(j).n)?);
        }
        println!("quadrature deviation: {quad:.3e}");
        worst = worst.max(quad);
        println!(
            "provenance ids: chain {:#018x} basis {:#018x} filter {:#018x}",
            chain_id(basis.chain()),
            basis_id(&basis),
            filter_bank_id(&fb)
        );
    }
    if worst > 1e-8 {
        return Err(FrameletError::FilterParam(format!(
            "verification deviation {worst:.3e} exceeds 1e-8"
        )));
    }
    println!("all checks passed");
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), FrameletError> {
    if a.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FrameletError::Parse(
            "bench sizes must be strictly ascending".into(),
        ));
    }
    let report = run_bench(
        &a.sizes,
        &BenchOptions {
            retention: a.retention,
            reps: a.reps,
            seed: a.seed,
        },
    )?;
    let mut csv = String::from("N,adds,muls,seconds\n");
    for r in &report.records {
        println!(
            "N={:>7}  adds={:>10}  muls={:>10}  seconds={:.6}",
            r.n, r.adds, r.muls, r.seconds
        );
        csv.push_str(&format!("{},{},{},{}\n", r.n, r.adds, r.muls, r.seconds));
    }
    let fmt = |s: Option<f64>| s.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
    match a.mode {
        BenchMode::Counts => println!("log-log slope (operation counts): {}", fmt(report.count_slope)),
        BenchMode::Walltime => println!("log-log slope (wall time): {}", fmt(report.time_slope)),
    }
    println!(
        "secondary slope ({}): {}",
        match a.mode {
            BenchMode::Counts => "wall time",
            BenchMode::Walltime => "operation counts",
        },
        fmt(match a.mode {
            BenchMode::Counts => report.time_slope,
            BenchMode::Walltime => report.count_slope,
        })
    );
    if let Some(out) = &a.out {
        std::fs::write(out, csv)?;
        println!("records written to {}", out.display());
    }
    Ok(())
}

fn cmd_demo_toy() -> Result<(), FrameletError> {
    let start = std::time::Instant::now();
    let checks = demo::run();
    let mut failed = 0usize;
    for c in &checks {
        let status = if c.pass() { "PASS" } else { "FAIL" };
        println!(
            "{status}  {:<44} deviation {:.3e} (tolerance {:.1e})",
            c.name, c.deviation, c.tolerance
        );
        if let Some(note) = &c.note {
            println!("      note: {note}");
        }
        if !c.pass() {
            failed += 1;
        }
    }
    println!(
        "{} checks, {failed} failed, {:.3} s",
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(FrameletError::FilterParam(format!(
            "{failed} golden checks failed"
        )));
    }
    Ok(())
}

fn cmd_mra(a: &MraArgs) -> Result<(), FrameletError> {
    let g = io::load_graph(&a.graph)?;
    let chain = build_chain(&g, &a.sizes, a.seed, None)?;
    let basis = honbc(&chain)?;
    let fb = bank_for(&basis, &a.tuning)?;
    let f = io::load_signal(&a.signal)?;
    let co = decompose(&fb, &basis, &f, a.j1)?;
    std::fs::create_dir_all(&a.out_dir)?;

    let approx_path = a.out_dir.join(format!("approx-level{}.csv", co.start_level()));
    write_block_csv(&approx_path, &representatives(&basis, co.start_level()), co.low())?;
    let mut emitted = 1usize;
    for t in 0..co.n_detail_levels() {
        let level = co.start_level() + t + 1;
        let reps = representatives(&basis, level);
        for (fam, block) in co.high(t).iter().enumerate() {
            let path = a
                .out_dir
                .join(format!("detail-level{level}-fam{fam}.csv"));
            write_block_csv(&path, &reps, block)?;
            emitted += 1;
        }
    }

    // Node-to-cluster map across all levels, for external plotting.
    let mut map = String::from("vertex,level,cluster\n");
    for v in 0..chain.n() {
        for j in 0..chain.depth() {
            map.push_str(&format!("{v},{j},{}\n", chain.ancestor(j, v)));
        }
    }
    std::fs::write(a.out_dir.join("clusters.csv"), map)?;

    println!(
        "wrote {emitted} coefficient blocks and the cluster map to {}",
        a.out_dir.display()
    );
    println!("coefficient energy: {:.6}", co.energy());
    Ok(())
}

// ==== entry =================================================================

fn exit_code_for(e: &FrameletError) -> u8 {
    match e {
        FrameletError::Io(_) | FrameletError::Parse(_) | FrameletError::Version { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // A second global-pool build (tests in one process) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match &cli.command {
        Command::Chain(a) => cmd_chain(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Transform(TransformCmd::Decompose(a)) => cmd_decompose(a),
        Command::Transform(TransformCmd::Reconstruct(a)) => cmd_reconstruct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::DemoToy => cmd_demo_toy(),
        Command::Mra(a) => cmd_mra(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
