//! Reconstruction of `m` random binary sequences from the union of their
//! `(k+1)`-mer sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: parameters, bit-packed sequences, source sets and k-mer sets.
//! * [`debruijn`]: the de Bruijn graph of a k-mer set and node multiplicity
//!   inference.
//! * [`events`]: exhaustive detectors for the repeat structures that drive
//!   (non-)uniqueness.
//! * [`reconstruct`]: exhaustive enumeration of all source sets consistent
//!   with a k-mer set, a brute-force oracle, and difference graphs.
//! * [`ambiguity`]: constructive alternative source sets from repeat witnesses.
//! * [`theory`]: closed-form region classification, union bounds and moment
//!   statistics.
//! * [`experiment`]: seeded, parallel Monte Carlo over parameter grids.

pub mod ambiguity;
pub mod debruijn;
mod error;
pub mod events;
pub mod experiment;
pub mod model;
pub mod reconstruct;
pub mod theory;
mod visits;

pub use ambiguity::{
    construct_rotation, construct_swap_d, construct_swap_h, construct_transposition,
    find_certificate, verify_equivalent, Certificate, Rearrangement, SwapOutcome,
};
pub use debruijn::{label_multiplicities, true_multiplicities, DeBruijnGraph, MultiplicityMap};
pub use error::{Error, Result};
pub use events::{EventKind, EventWitness};
pub use experiment::{
    emit_csv, emit_svg_heatmap, parse_csv, run_cell, run_grid, run_grid_with_threads, CellReport,
    Estimate, ExperimentConfig, Measure,
};
pub use model::{
    derive_params, extract_kmer_set, generate_sources, BitSequence, KmerSet, Params, SourceSet,
    Windows,
};
pub use reconstruct::{
    brute_force_oracle, count_maximal_shared_subpaths, difference_graph, enumerate_reconstructions,
    is_unique, Budget, DifferenceGraph, ReconstructionResult, Uniqueness,
};
pub use theory::{
    classify_region, event_bounds, moments_u, moments_v, repeat_free_bound, u_statistic,
    v_statistic, Constraint, MomentReport, RegionClass, Verdict,
};
