//! Matroid oracles, elementary split matroids, partitions into disjoint
//! bases, and cyclic orderings in which those bases appear as consecutive
//! intervals.
//!
//! The crate needs only `alloc`. Ground sets have at most 64 elements and
//! elements are the integers `0..n`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod exchange;
pub mod fixtures;
pub mod matroid;
pub mod ordering;
pub mod partition;
pub mod set;
pub mod split;
mod union_find;

pub use error::{Diagnostic, Error, Result};
pub use exchange::{
    apply_move, compatible, exchange_distance, legal_moves, min_exchange_weight, move_weight,
    ordering_to_exchange_script, BasisSequence, ExchangeKind, ExchangeMove, Weights,
};
pub use matroid::{
    direct_sum, exchange_candidates, greedy_independent, Component, DirectSum, ExplicitBases, Graphic, Matroid,
    MatroidKind, MatroidOracle, Uniform,
};
pub use ordering::{
    block_partition_is_valid, brute_force_cyclic_ordering, check_cyclic_ordering, cyclic_order, cyclic_order_oracle,
    evaluation_budget, find_block_partition, verify_cyclic_ordering, CyclicOrdering, OrderingDefect, OrderingOptions,
    OrderingRun, OrderingStats,
};
pub use partition::{cover_by_bases, is_uniformly_dense, partition_into_bases, BasisPartition};
pub use set::ElementSet;
pub use split::{components, compose_component_orderings, normalize_and_validate, Hyperedge, SplitRepresentation};
