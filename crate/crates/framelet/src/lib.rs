//! Decimated tight framelets on weighted graphs.
//!
//! The crate builds coarse-grained chains (nested partitions of a graph),
//! orthonormal bases adapted to those chains, tight framelet filter banks in
//! the induced spectral domain, and fast decomposition/reconstruction
//! transforms whose cost is linear in the number of vertices.
//!
//! Pipeline: [`graph::Graph`] -> [`chain::build_chain`] -> [`basis::honbc`] or
//! [`basis::onbc`] -> [`filters::build_generators`] or
//! [`filters::preset_filter_bank`] -> [`transforms::decompose`] /
//! [`transforms::reconstruct`]. Dense synthesis in [`synthesis`] serves as the
//! slow reference the fast path is checked against.

#![forbid(unsafe_code)]

pub mod basis;
pub mod bench;
pub mod chain;
pub mod error;
pub mod filters;
pub mod graph;
pub mod io;
pub mod synthesis;
pub mod toy;
pub mod transforms;

pub use basis::{honbc, onbc, spoc, verify_chain_basis, BasisKind, ChainBasis};

pub use chain::{build_chain, build_chain_slim, build_chain_with_assignments, coarsen_once, Chain};
pub use error::{FrameletError, Result};
pub use filters::{
    build_generators, check_tightness, check_tightness_generators, derive_filter_bank,
    generators_from_filters, preset_filter_bank, FilterBank, GeneratorOptions, GeneratorSet,
    PresetOptions, TightnessReport,
};
pub use graph::Graph;
pub use synthesis::{
    build_framelet_system, build_undecimated_system, dense_analysis_matrix, frame_bounds,
    quadrature_check, synth_decimated, synth_undecimated, FrameletSystem, SystemKind,
};
pub use transforms::{
    basis_id, blockwise_product, chain_id, decompose, decompose_counted, decompose_level,
    fast_adft, fast_adft_counted, fast_dft, fast_dft_counted, filter_bank_id, framelet_convolve,
    level_adft, level_dft, reconstruct, reconstruct_counted, reconstruct_level, Coefficients,
    OpCounter, Provenance, SpectralCache,
};
