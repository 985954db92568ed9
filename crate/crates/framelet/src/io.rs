//! File formats for graphs, signals, and pipeline artifacts.
//!
//! Graphs travel either as TSV edge lists (`u<TAB>v<TAB>weight`, 0-based
//! ids, `#` comments) or as a structured JSON document; chains, bases,
//! filter banks, and coefficients share one versioned JSON bundle type.
//! Large dense blocks can optionally live in a sidecar binary file with a
//! 16-byte header. Every serializer is deterministic, so
//! serialize -> parse -> serialize is byte-identical.

use crate::basis::{self, BasisKind, BasisVector, ChainBasis, VectorForm};
use crate::chain::{build_chain_with_assignments, Chain};
use crate::error::{FrameletError, Result};
use crate::filters::{FilterBank, Transition};
use crate::graph::Graph;
use crate::transforms::{chain_id, Coefficients, Provenance};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Format version stamped into every bundle and checked on load.
pub const BUNDLE_VERSION: u32 = 1;

const MATRIX_MAGIC: &[u8; 8] = b"FRMLBLK\0";

// ==== graphs: TSV edge list =================================================

/// Parse a TSV edge list: one `u<TAB>v<TAB>weight` triple per line, 0-based
/// vertex ids, blank lines and `#` comments ignored. The vertex count is the
/// largest id seen plus one.
pub fn parse_graph_tsv(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let mut field = |name: &str| {
            parts
                .next()
                .ok_or_else(|| FrameletError::parse_at(line_no, format!("missing {name} field")))
        };
        let u: usize = field("source")?
            .parse()
            .map_err(|e| FrameletError::parse_at(line_no, format!("bad source id: {e}")))?;
        let v: usize = field("target")?
            .parse()
            .map_err(|e| FrameletError::parse_at(line_no, format!("bad target id: {e}")))?;
        let w: f64 = field("weight")?
            .parse()
            .map_err(|e| FrameletError::parse_at(line_no, format!("bad weight: {e}")))?;
        if parts.next().is_some() {
            return Err(FrameletError::parse_at(line_no, "expected exactly 3 fields"));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(FrameletError::Parse("edge list is empty".into()));
    }
    Graph::build(n, &edges)
}

/// Serialize a graph as a TSV edge list in canonical (u <= v, sorted) order.
/// Labels are not representable in this format; use JSON to keep them.
pub fn serialize_graph_tsv(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        out.push_str(&format!("{u}\t{v}\t{w}\n"));
    }
    out
}

// ==== graphs: JSON document =================================================

/// Structured graph document: vertex count, canonical edge triples, and
/// optional vertex labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn graph_to_doc(g: &Graph) -> GraphDoc {
    GraphDoc {
        n: g.n(),
        edges: g.edges(),
        labels: g.labels().map(|l| l.to_vec()),
    }
}

pub fn graph_from_doc(doc: &GraphDoc) -> Result<Graph> {
    let g = Graph::build(doc.n, &doc.edges)?;
    match &doc.labels {
        Some(l) => g.with_labels(l.clone()),
        None => Ok(g),
    }
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| FrameletError::Parse(e.to_string()))?;
    graph_from_doc(&doc)
}

pub fn serialize_graph_json(g: &Graph) -> String {
    let mut s = serde_json::to_string_pretty(&graph_to_doc(g)).expect("graph doc serializes");
    s.push('\n');
    s
}

/// Load a graph by extension: `.json` as a document, anything else as TSV.
pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_graph_json(&text)
    } else {
        parse_graph_tsv(&text)
    }
}

pub fn save_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let path = path.as_ref();
    let text = if path.extension().is_some_and(|e| e == "json") {
        serialize_graph_json(g)
    } else {
        serialize_graph_tsv(g)
    };
    std::fs::write(path, text)?;
    Ok(())
}

// ==== vertex signals: CSV ===================================================

/// Parse a `node,value` CSV. The header is required and rows must cover
/// vertices 0..n in order; that keeps the format unambiguous and the
/// round trip byte-exact.
pub fn parse_signal_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "node,value" => {}
        _ => return Err(FrameletError::parse_at(1, "expected header 'node,value'")),
    }
    let mut values = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (node_s, value_s) = line
            .split_once(',')
            .ok_or_else(|| FrameletError::parse_at(line_no, "expected 'node,value'"))?;
        let node: usize = node_s
            .trim()
            .parse()
            .map_err(|e| FrameletError::parse_at(line_no, format!("bad node id: {e}")))?;
        if node != values.len() {
            return Err(FrameletError::parse_at(
                line_no,
                format!("node {node} out of order, expected {}", values.len()),
            ));
        }
        let value: f64 = value_s
            .trim()
            .parse()
            .map_err(|e| FrameletError::parse_at(line_no, format!("bad value: {e}")))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(FrameletError::Parse("signal has no rows".into()));
    }
    Ok(values)
}

pub fn serialize_signal_csv(f: &[f64]) -> String {
    let mut out = String::from("node,value\n");
    for (i, x) in f.iter().enumerate() {
        out.push_str(&format!("{i},{x}\n"));
    }
    out
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_signal_csv(&std::fs::read_to_string(path)?)
}

pub fn save_signal(path: impl AsRef<Path>, f: &[f64]) -> Result<()> {
    std::fs::write(path, serialize_signal_csv(f))?;
    Ok(())
}

// ==== dense binary blocks ===================================================

/// Encode a row-major matrix as magic (8 bytes), rows and cols (u32 little
/// endian each), then rows*cols little-endian f64 values.
pub fn encode_matrix(rows: usize, cols: usize, data: &[f64]) -> Result<Vec<u8>> {
    if rows > u32::MAX as usize || cols > u32::MAX as usize || rows * cols != data.len() {
        return Err(FrameletError::SizeMismatch {
            what: "matrix block shape".into(),
            expected: rows * cols,
            got: data.len(),
        });
    }
    let mut out = Vec::with_capacity(16 + 8 * data.len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&(rows as u32).to_le_bytes());
    out.extend_from_slice(&(cols as u32).to_le_bytes());
    for x in data {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_matrix(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 16 {
        return Err(FrameletError::Parse("matrix block shorter than header".into()));
    }
    if &bytes[..8] != MATRIX_MAGIC {
        return Err(FrameletError::Parse("bad matrix block magic".into()));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(16))
        .ok_or_else(|| FrameletError::Parse("matrix block shape overflows".into()))?;
    if bytes.len() != expected {
        return Err(FrameletError::Parse(format!(
            "matrix block holds {} bytes, header promises {expected}",
            bytes.len()
        )));
    }
    let data = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((rows, cols, data))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<f64>)> {
    decode_matrix(&std::fs::read(path)?)
}

pub fn save_matrix(path: impl AsRef<Path>, rows: usize, cols: usize, data: &[f64]) -> Result<()> {
    std::fs::write(path, encode_matrix(rows, cols, data)?)?;
    Ok(())
}

// ==== artifact bundle =======================================================

/// Chain manifest: the bottom graph plus per-coarsening cluster assignments
/// (finest step first), with the resulting level sizes and quadrature
/// weights recorded redundantly so a load can cross-check the rebuild.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainManifest {
    pub graph: GraphDoc,
    pub assignments: Vec<Vec<u32>>,
    /// Level sizes, coarsest first.
    pub sizes: Vec<usize>,
    /// Per level (coarsest first): cluster cardinalities.
    pub weights: Vec<Vec<f64>>,
}

/// One basis vector in its sparse stored form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormDoc {
    Dense {
        values: Vec<f64>,
    },
    Constant {
        value: f64,
    },
    HaarPair {
        parent: Option<u32>,
        k: u32,
        head: f64,
        tail: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDoc {
    pub home: usize,
    pub form: FormDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisPayload {
    /// "haar" or "laplacian".
    pub kind: String,
    /// Content id of the chain this basis belongs to.
    pub chain_id: u64,
    /// Vector count per level group (equals the level sizes).
    pub level_bounds: Vec<usize>,
    /// Surrogate eigenvalues fed to spectral filters (the vector index).
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_eigenvalues: Option<Vec<Vec<f64>>>,
    pub vectors: Vec<VectorDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub low: Vec<f64>,
    pub high: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterBankPayload {
    /// Level sizes, coarsest first.
    pub sizes: Vec<usize>,
    /// One filter set per refinement transition, coarsest first.
    pub transitions: Vec<TransitionDoc>,
}

/// One coefficient block: `level` is the level its values live on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub name: String,
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<usize>,
    pub len: usize,
    /// Inline values; absent when the bundle uses a binary sidecar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsPayload {
    pub start_level: usize,
    pub chain_id: u64,
    pub basis_id: u64,
    pub filter_id: u64,
    pub blocks: Vec<BlockDoc>,
    /// Sidecar file (relative to the bundle) holding all block values
    /// concatenated as one column-vector matrix block, in block order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary_file: Option<String>,
}

/// Versioned container for pipeline artifacts; any subset may be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactBundle {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainManifest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_bank: Option<FilterBankPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientsPayload>,
}

impl ArtifactBundle {
    pub fn new() -> ArtifactBundle {
        ArtifactBundle {
            version: BUNDLE_VERSION,
            chain: None,
            basis: None,
            filter_bank: None,
            coefficients: None,
        }
    }
}

impl Default for ArtifactBundle {
    fn default() -> Self {
        ArtifactBundle::new()
    }
}

pub fn bundle_to_json(b: &ArtifactBundle) -> String {
    let mut s = serde_json::to_string_pretty(b).expect("bundle serializes");
    s.push('\n');
    s
}

/// Parse a bundle and check its format version.
pub fn bundle_from_json(text: &str) -> Result<ArtifactBundle> {
    let b: ArtifactBundle =
        serde_json::from_str(text).map_err(|e| FrameletError::Parse(e.to_string()))?;
    if b.version != BUNDLE_VERSION {
        return Err(FrameletError::Version {
            expected: BUNDLE_VERSION,
            got: b.version,
        });
    }
    Ok(b)
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<ArtifactBundle> {
    bundle_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_bundle(path: impl AsRef<Path>, b: &ArtifactBundle) -> Result<()> {
    std::fs::write(path, bundle_to_json(b))?;
    Ok(())
}

// ==== chain <-> manifest ====================================================

/// Manifest of a fully materialized chain. Slim chains (no bottom graph)
/// cannot be serialized.
pub fn chain_to_manifest(c: &Chain) -> Result<ChainManifest> {
    let depth = c.depth();
    let bottom = c
        .level(depth - 1)
        .graph
        .as_ref()
        .ok_or_else(|| FrameletError::InvalidChain("chain has no bottom graph to store".into()))?;
    // Assignments finest-first: the parent map of each level below the top.
    let assignments: Vec<Vec<u32>> = (1..depth).rev().map(|j| c.level(j).parent.clone()).collect();
    let weights: Vec<Vec<f64>> = (0..depth)
        .map(|j| c.level(j).cluster_size.iter().map(|&s| s as f64).collect())
        .collect();
    Ok(ChainManifest {
        graph: graph_to_doc(bottom),
        assignments,
        sizes: c.sizes(),
        weights,
    })
}

/// Rebuild a chain from its manifest and cross-check the recorded sizes and
/// weights against the rebuild.
pub fn chain_from_manifest(m: &ChainManifest) -> Result<Chain> {
    let g = graph_from_doc(&m.graph)?;
    let c = build_chain_with_assignments(&g, &m.assignments)?;
    if c.sizes() != m.sizes {
        return Err(FrameletError::InvalidChain(format!(
            "manifest sizes {:?} disagree with rebuilt sizes {:?}",
            m.sizes,
            c.sizes()
        )));
    }
    if m.weights.len() != c.depth() {
        return Err(FrameletError::InvalidChain(
            "manifest weight levels disagree with depth".into(),
        ));
    }
    for j in 0..c.depth() {
        let lv = c.level(j);
        if m.weights[j].len() != lv.n
            || (0..lv.n).any(|p| (m.weights[j][p] - lv.cluster_size[p] as f64).abs() > 1e-9)
        {
            return Err(FrameletError::InvalidChain(format!(
                "manifest weights disagree with the rebuild at level {j}"
            )));
        }
    }
    Ok(c)
}

// ==== basis <-> payload =====================================================

pub fn basis_to_payload(b: &ChainBasis) -> BasisPayload {
    let vectors = (0..b.n())
        .map(|i| {
            let v = b.vector(i);
            let form = match &v.form {
                VectorForm::Dense(values) => FormDoc::Dense {
                    values: values.clone(),
                },
                VectorForm::Constant(value) => FormDoc::Constant { value: *value },
                VectorForm::HaarPair {
                    parent,
                    k,
                    head_val,
                    tail_val,
                } => FormDoc::HaarPair {
                    parent: *parent,
                    k: *k,
                    head: *head_val,
                    tail: *tail_val,
                },
            };
            VectorDoc {
                home: v.home_level,
                form,
            }
        })
        .collect();
    BasisPayload {
        kind: match b.kind() {
            BasisKind::Haar => "haar".into(),
            BasisKind::Laplacian => "laplacian".into(),
        },
        chain_id: chain_id(b.chain()),
        level_bounds: b.level_bounds(),
        lambdas: b.lambdas().to_vec(),
        raw_eigenvalues: b.raw_eigenvalues().map(|r| r.to_vec()),
        vectors,
    }
}

/// Rebuild a basis over an already-loaded chain; the payload's recorded
/// chain id must match.
pub fn basis_from_payload(chain: Chain, p: &BasisPayload) -> Result<ChainBasis> {
    let expected = chain_id(&chain);
    if p.chain_id != expected {
        return Err(FrameletError::ProvenanceMismatch {
            what: "chain id recorded in the basis payload".into(),
            expected,
            got: p.chain_id,
        });
    }
    let kind = match p.kind.as_str() {
        "haar" => BasisKind::Haar,
        "laplacian" => BasisKind::Laplacian,
        other => {
            return Err(FrameletError::Parse(format!("unknown basis kind '{other}'")));
        }
    };
    let vectors = p
        .vectors
        .iter()
        .map(|d| {
            let form = match &d.form {
                FormDoc::Dense { values } => VectorForm::Dense(values.clone()),
                FormDoc::Constant { value } => VectorForm::Constant(*value),
                FormDoc::HaarPair {
                    parent,
                    k,
                    head,
                    tail,
                } => VectorForm::HaarPair {
                    parent: *parent,
                    k: *k,
                    head_val: *head,
                    tail_val: *tail,
                },
            };
            BasisVector {
                home_level: d.home,
                form,
            }
        })
        .collect();
    basis::from_stored(chain, kind, vectors, p.raw_eigenvalues.clone())
}

/// Load a chain + basis pair from one bundle.
pub fn basis_from_bundle(b: &ArtifactBundle) -> Result<ChainBasis> {
    let manifest = b
        .chain
        .as_ref()
        .ok_or_else(|| FrameletError::Parse("bundle has no chain manifest".into()))?;
    let payload = b
        .basis
        .as_ref()
        .ok_or_else(|| FrameletError::Parse("bundle has no basis payload".into()))?;
    basis_from_payload(chain_from_manifest(manifest)?, payload)
}

// ==== filter bank <-> payload ===============================================

pub fn filter_bank_to_payload(fb: &FilterBank) -> FilterBankPayload {
    FilterBankPayload {
        sizes: fb.level_sizes().to_vec(),
        transitions: (0..fb.n_transitions())
            .map(|t| {
                let tr = fb.transition(t);
                TransitionDoc {
                    low: tr.low.clone(),
                    high: tr.high.clone(),
                }
            })
            .collect(),
    }
}

pub fn filter_bank_from_payload(p: &FilterBankPayload) -> Result<FilterBank> {
    if p.sizes.len() < 2 || p.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FrameletError::FilterParam(format!(
            "level sizes must be strictly increasing coarsest-first, got {:?}",
            p.sizes
        )));
    }
    if p.transitions.len() != p.sizes.len() - 1 {
        return Err(FrameletError::SizeMismatch {
            what: "filter bank transition count".into(),
            expected: p.sizes.len() - 1,
            got: p.transitions.len(),
        });
    }
    let mut transitions = Vec::with_capacity(p.transitions.len());
    for (t, tr) in p.transitions.iter().enumerate() {
        let grid = tr.low.len();
        if grid < p.sizes[t + 1] {
            return Err(FrameletError::SizeMismatch {
                what: format!("filter grid at transition {t}"),
                expected: p.sizes[t + 1],
                got: grid,
            });
        }
        if tr.high.is_empty() || tr.high.iter().any(|h| h.len() != grid) {
            return Err(FrameletError::SizeMismatch {
                what: format!("high-pass grid at transition {t}"),
                expected: grid,
                got: tr.high.iter().map(|h| h.len()).find(|&l| l != grid).unwrap_or(0),
            });
        }
        if tr.low.iter().chain(tr.high.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(FrameletError::Parse(format!(
                "non-finite filter sample at transition {t}"
            )));
        }
        transitions.push(Transition {
            low: tr.low.clone(),
            high: tr.high.clone(),
        });
    }
    Ok(FilterBank {
        sizes: p.sizes.clone(),
        transitions,
    })
}

// ==== coefficients <-> payload ==============================================

/// Serialize coefficients. With `binary_file` set, values go to that sidecar
/// (written by [`save_coefficients`]) and the bundle keeps only block shapes.
pub fn coefficients_to_payload(co: &Coefficients, binary_file: Option<String>) -> CoefficientsPayload {
    let inline = binary_file.is_none();
    let mut blocks = Vec::new();
    let mut push = |name: String, level: usize, family: Option<usize>, values: &[f64]| {
        blocks.push(BlockDoc {
            name,
            level,
            family,
            len: values.len(),
            values: inline.then(|| values.to_vec()),
        });
    };
    push("low".into(), co.start_level(), None, co.low());
    for t in 0..co.n_detail_levels() {
        let level = co.start_level() + t + 1;
        for (n, block) in co.high(t).iter().enumerate() {
            push(format!("detail-{level}-{n}"), level, Some(n), block);
        }
    }
    let p = co.provenance();
    CoefficientsPayload {
        start_level: co.start_level(),
        chain_id: p.chain_id,
        basis_id: p.basis_id,
        filter_id: p.filter_id,
        blocks,
        binary_file,
    }
}

/// Rebuild coefficients from a payload; `sidecar` supplies the binary bytes
/// when the payload references a sidecar file.
pub fn coefficients_from_payload(
    p: &CoefficientsPayload,
    sidecar: Option<&[u8]>,
) -> Result<Coefficients> {
    let total: usize = p.blocks.iter().map(|b| b.len).sum();
    let flat: Option<Vec<f64>> = match (&p.binary_file, sidecar) {
        (Some(_), Some(bytes)) => {
            let (rows, cols, data) = decode_matrix(bytes)?;
            if cols != 1 || rows != total {
                return Err(FrameletError::SizeMismatch {
                    what: "coefficient sidecar shape".into(),
                    expected: total,
                    got: rows * cols,
                });
            }
            Some(data)
        }
        (Some(_), None) => {
            return Err(FrameletError::Parse(
                "payload references a binary sidecar that was not provided".into(),
            ));
        }
        (None, _) => None,
    };
    let mut offset = 0usize;
    let mut take = |b: &BlockDoc| -> Result<Vec<f64>> {
        let vals = match (&flat, &b.values) {
            (Some(f), _) => f[offset..offset + b.len].to_vec(),
            (None, Some(v)) => {
                if v.len() != b.len {
                    return Err(FrameletError::SizeMismatch {
                        what: format!("block '{}' length", b.name),
                        expected: b.len,
                        got: v.len(),
                    });
                }
                v.clone()
            }
            (None, None) => {
                return Err(FrameletError::Parse(format!(
                    "block '{}' has neither inline values nor a sidecar",
                    b.name
                )));
            }
        };
        offset += b.len;
        Ok(vals)
    };
    let mut blocks = p.blocks.iter();
    let low_doc = blocks
        .next()
        .ok_or_else(|| FrameletError::Parse("coefficients payload has no blocks".into()))?;
    if low_doc.family.is_some() || low_doc.level != p.start_level {
        return Err(FrameletError::Parse(
            "first coefficient block must be the low pass on the start level".into(),
        ));
    }
    let low = take(low_doc)?;
    let mut high: Vec<Vec<Vec<f64>>> = Vec::new();
    for b in blocks {
        let fam = b.family.ok_or_else(|| {
            FrameletError::Parse(format!("detail block '{}' lacks a family index", b.name))
        })?;
        let t = b
            .level
            .checked_sub(p.start_level + 1)
            .ok_or_else(|| FrameletError::Parse(format!("block '{}' level underflows", b.name)))?;
        if t == high.len() {
            high.push(Vec::new());
        } else if t + 1 != high.len() {
            return Err(FrameletError::Parse(format!(
                "block '{}' is out of order",
                b.name
            )));
        }
        if fam != high[t].len() {
            return Err(FrameletError::Parse(format!(
                "block '{}' is out of order",
                b.name
            )));
        }
        high[t].push(take(b)?);
    }
    Ok(Coefficients::from_parts(
        p.start_level,
        low,
        high,
        Provenance {
            chain_id: p.chain_id,
            basis_id: p.basis_id,
            filter_id: p.filter_id,
        },
    ))
}

/// Save coefficients as a bundle; with `binary`, values go to a sibling
/// `.bin` file referenced by name.
pub fn save_coefficients(path: impl AsRef<Path>, co: &Coefficients, binary: bool) -> Result<()> {
    let path = path.as_ref();
    let mut bundle = ArtifactBundle::new();
    if binary {
        let bin_name = format!(
            "{}.bin",
            path.file_stem().and_then(|s| s.to_str()).unwrap_or("coefficients")
        );
        let flat: Vec<f64> = co.blocks().flatten().copied().collect();
        save_matrix(path.with_file_name(&bin_name), flat.len(), 1, &flat)?;
        bundle.coefficients = Some(coefficients_to_payload(co, Some(bin_name)));
    } else {
        bundle.coefficients = Some(coefficients_to_payload(co, None));
    }
    save_bundle(path, &bundle)
}

/// Load coefficients saved by [`save_coefficients`], resolving any sidecar
/// next to the bundle.
pub fn load_coefficients(path: impl AsRef<Path>) -> Result<Coefficients> {
    let path = path.as_ref();
    let bundle = load_bundle(path)?;
    let payload = bundle
        .coefficients
        .as_ref()
        .ok_or_else(|| FrameletError::Parse("bundle has no coefficients payload".into()))?;
    let sidecar = match &payload.binary_file {
        Some(name) => Some(std::fs::read(path.with_file_name(name))?),
        None => None,
    };
    coefficients_from_payload(payload, sidecar.as_deref())
}

// ==== tests =================================================================
