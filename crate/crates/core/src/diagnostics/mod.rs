//! Exact analysis of small instances: state enumeration, transition
//! matrices, stationary vectors, spectral gaps, mixing times, conductance.

mod enumerate;
mod matrix;
mod spectral;

pub use enumerate::{
    all_set_partitions, enumerate_states, omega_k_closure, set_partition_count, Closure, StateSpace, DEFAULT_STATE_CAP,
};
pub use matrix::{
    build_labeled_matrix, build_matrix, build_matrix_on_set, frozen_states, labeled_states, lump_map, summarize,
    MatrixSummary, SparseMatrix,
};
pub use spectral::{
    conductance, edge_flow, max_abs_diff, mixing_lower_bound, mixing_upper_bound, normalize, spectral_gap,
    stationary_vector, tv_distance, tv_mixing_time, SpectralReport, Stationary,
};

use crate::glauber::{is_frozen, target_weight, ChainVariant};
use crate::graph::Graph;

/// Indices of states where no vertex can move.
pub fn find_frozen(g: &Graph, space: &StateSpace) -> Vec<usize> {
    (0..space.len()).filter(|&i| is_frozen(g, space.state(i), space.params())).collect()
}

/// Declared stationary distribution of `variant` over `space`.
pub fn declared_target(space: &StateSpace, variant: ChainVariant) -> Vec<f64> {
    normalize(&space.states().iter().map(|s| target_weight(s, variant)).collect::<Vec<_>>())
}
