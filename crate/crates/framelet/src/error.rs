//! Error types shared across the library.

use thiserror::Error;

/// Unified error type for graph, chain, basis, filter, and transform construction.
#[derive(Error, Debug)]
pub enum FrameletError {
    #[error("vertex id {id} out of range for graph with {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },

    #[error("negative edge weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("graph is disconnected: vertex {vertex} unreachable from vertex 0")]
    Disconnected { vertex: usize },

    #[error("invalid cluster count {k} for graph with {n} vertices")]
    InvalidClusterCount { k: usize, n: usize },

    #[error("level sizes must be strictly decreasing and below {n}: got {sizes:?}")]
    InvalidLevelSizes { n: usize, sizes: Vec<usize> },

    #[error("chain validation failed: {0}")]
    InvalidChain(String),

    #[error("injected assignment invalid: {0}")]
    InvalidAssignment(String),

    #[error("basis construction failed at level {level}: {reason}")]
    BasisConstruction { level: usize, reason: String },

    #[error("level graphs absent at level {level}; this chain was built in slim mode and only supports the Haar basis")]
    LevelGraphMissing { level: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("bump parameters invalid: need cL < cR and epsL + epsR <= cR - cL, got cL={c_l}, cR={c_r}, epsL={eps_l}, epsR={eps_r}")]
    BumpParams { c_l: f64, c_r: f64, eps_l: f64, eps_r: f64 },

    #[error("spline order must be >= 1, got {0}")]
    SplineOrder(usize),

    #[error("scaling factors violate the strict condition factor[j+1] > factor[j]/eps at level {level}: {lo} -> {hi} with eps={eps}")]
    ScalingCondition { level: usize, lo: f64, hi: f64, eps: f64 },

    #[error("partition cut points invalid: {0}")]
    PartitionCuts(String),

    #[error("filter parameter out of range: {0}")]
    FilterParam(String),

    #[error("low-pass value {value:.3e} below division threshold inside declared support at level {level}, grid index {index}")]
    DivisionThreshold { level: usize, index: usize, value: f64 },

    #[error("filter bank has no level {level}")]
    FilterLevelMissing { level: usize },

    #[error("size mismatch: expected {expected}, got {got} ({what})")]
    SizeMismatch { what: String, expected: usize, got: usize },

    #[error("level {level} out of range [{lo}, {hi}]")]
    LevelOutOfRange { level: usize, lo: usize, hi: usize },

    #[error("node {node} not present at level {level}")]
    NodeOutOfRange { node: usize, level: usize },

    #[error("artifact provenance mismatch: {what} id {got:#x} does not match expected {expected:#x}")]
    ProvenanceMismatch { what: String, expected: u64, got: u64 },

    #[error("spectral truncation would lose energy {lost:.3e} at level {level} (low-pass support leaks past the coarse bandwidth)")]
    TruncationLeak { level: usize, lost: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported artifact version {got} (expected {expected})")]
    Version { expected: u32, got: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl FrameletError {
    /// Parse error with a 1-based line number, used by the text formats.
    pub fn parse_at(line: usize, msg: impl std::fmt::Display) -> Self {
        FrameletError::Parse(format!("line {line}: {msg}"))
    }
}

pub type Result<T> = std::result::Result<T, FrameletError>;
