//! Cyclic orderings in which the parts of a basis partition are
//! consecutive intervals.
//!
//! For an elementary split matroid and `k >= 3` the ordering is built in
//! phases: in phase `j` every basis `B_i` gets its `j`-th element so that
//! the windows straddling the boundary between `B_i` and `B_{i+1}` stay
//! bases. When no choice works the state is analysed ([`derive_certificate`])
//! and one already placed element is swapped with a remaining one
//! ([`resolve_stuck`]), which always unlocks a valid choice.

mod brute;
mod certificate;
mod state;

use alloc::vec::Vec;
use core::cell::Cell;

pub use brute::{block_partition_is_valid, brute_force_cyclic_ordering, find_block_partition};
pub use certificate::{
    check_certificate, derive_certificate, resolve_stuck, Derivation, Resolution, StuckCertificate,
    SubstitutionCase,
};
pub use state::{build_p_chain, ChainOutcome, OrderingState};

use crate::error::{Diagnostic, Error, Result};
use crate::matroid::{Matroid, MatroidOracle};
use crate::partition::BasisPartition;
use crate::set::ElementSet;
use crate::split::{compose_component_orderings, SplitRepresentation};

/// A permutation `s_1, .., s_n` of the ground set, optionally divided into
/// consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicOrdering {
    order: Vec<usize>,
    /// `0 = b_0 <= b_1 <= .. <= b_k = n`; block `i` is `order[b_i..b_{i+1}]`.
    /// Empty when the ordering has no block structure.
    block_bounds: Vec<usize>,
}

impl CyclicOrdering {
    pub fn new(order: Vec<usize>, block_bounds: Vec<usize>) -> Self {
        CyclicOrdering { order, block_bounds }
    }

    /// Splits `order` into blocks of `width` elements.
    pub fn with_uniform_blocks(order: Vec<usize>, width: usize) -> Self {
        let bounds = match order.len().checked_div(width) {
            Some(count) => (0..=count).map(|i| i * width).collect(),
            None => Vec::new(),
        };
        CyclicOrdering { order, block_bounds: bounds }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn block_bounds(&self) -> &[usize] {
        &self.block_bounds
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.block_bounds.len().saturating_sub(1)
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.order[self.block_bounds[i]..self.block_bounds[i + 1]]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.block_bounds.windows(2).map(|w| &self.order[w[0]..w[1]])
    }

    pub fn block_sets(&self) -> Vec<ElementSet> {
        self.blocks().map(|b| b.iter().collect()).collect()
    }

    /// The `len`-element window starting at position `start`, cyclically.
    pub fn window(&self, start: usize, len: usize) -> ElementSet {
        let n = self.order.len();
        (0..len).map(|o| self.order[(start + o) % n]).collect()
    }

    /// Moves the first block to the end.
    pub fn rotate_blocks(&self) -> CyclicOrdering {
        if self.block_count() == 0 {
            return self.clone();
        }
        let shift = self.block_bounds[1];
        let mut order = self.order.clone();
        order.rotate_left(shift);
        let bounds = self.block_bounds[1..].iter().map(|b| b - shift).chain([self.order.len()]).collect();
        CyclicOrdering { order, block_bounds: bounds }
    }
}

/// Why an ordering fails verification.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderingDefect {
    #[error("order is not a permutation of the {n}-element ground set")]
    NotPermutation { n: usize },
    #[error("window starting at position {start} is not a basis: {window:?}")]
    WindowNotBasis { start: usize, window: ElementSet },
    #[error("malformed block bounds")]
    MalformedBlocks,
    #[error("block {block} has {found} elements instead of {expected}")]
    BlockSize { block: usize, expected: usize, found: usize },
    #[error("expected {expected} blocks, found {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("block {block} is {found:?}, expected {expected:?}")]
    BlockMismatch { block: usize, expected: ElementSet, found: ElementSet },
}

/// Checks that every cyclic window of `r` elements is a basis, that the
/// blocks have `r` elements, and, when `expected` is given, that block `i`
/// is exactly `expected[i]`.
pub fn check_cyclic_ordering<M: Matroid + ?Sized>(
    m: &M,
    ordering: &CyclicOrdering,
    expected: Option<&[ElementSet]>,
) -> core::result::Result<(), OrderingDefect> {
    let (n, r) = (m.ground_size(), m.full_rank());
    let as_set: ElementSet = ordering.order.iter().collect();
    if ordering.order.len() != n || as_set != m.ground_set() {
        return Err(OrderingDefect::NotPermutation { n });
    }
    if n > 0 {
        for start in 0..n {
            let window = ordering.window(start, r);
            if !m.is_basis(window) {
                return Err(OrderingDefect::WindowNotBasis { start, window });
            }
        }
    }
    let bounds = &ordering.block_bounds;
    if !bounds.is_empty() {
        if bounds[0] != 0 || *bounds.last().unwrap() != n || bounds.windows(2).any(|w| w[0] > w[1]) {
            return Err(OrderingDefect::MalformedBlocks);
        }
        for (block, b) in ordering.blocks().enumerate() {
            if b.len() != r {
                return Err(OrderingDefect::BlockSize { block, expected: r, found: b.len() });
            }
        }
    }
    if let Some(expected) = expected {
        if ordering.block_count() != expected.len() {
            return Err(OrderingDefect::BlockCount { expected: expected.len(), found: ordering.block_count() });
        }
        for (block, (found, &want)) in ordering.block_sets().into_iter().zip(expected).enumerate() {
            if found != want {
                return Err(OrderingDefect::BlockMismatch { block, expected: want, found });
            }
        }
    }
    Ok(())
}

pub fn verify_cyclic_ordering<M: Matroid + ?Sized>(
    m: &M,
    ordering: &CyclicOrdering,
    expected: Option<&[ElementSet]>,
) -> bool {
    check_cyclic_ordering(m, ordering, expected).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrderingOptions {
    /// Check every tightness fact the construction relies on, not only the
    /// window invariant.
    pub check_deep: bool,
}

/// Where the choice placed in a phase came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceSource {
    /// The greedy exchange chain closed up.
    Chain,
    /// A mixed `(q.., p..)` candidate while collecting the first hyperedges.
    StageA,
    /// A `(p.., q..)` or all-`q` candidate while collecting the second hyperedges.
    StageB,
    /// A candidate built around an element outside both classes.
    StageC,
    /// A choice unlocked by swapping a placed element.
    Substitution,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderingStats {
    pub phases: usize,
    pub substitutions: usize,
    pub certificates: usize,
    pub basis_evaluations: u64,
    /// Indexed by `ChoiceSource as usize`.
    pub choice_sources: [usize; 5],
    /// Indexed by `SubstitutionCase::index`.
    pub cases: [usize; SubstitutionCase::COUNT],
}

impl OrderingStats {
    pub fn merge(&mut self, other: &OrderingStats) {
        self.phases += other.phases;
        self.substitutions += other.substitutions;
        self.certificates += other.certificates;
        self.basis_evaluations += other.basis_evaluations;
        for (a, b) in self.choice_sources.iter_mut().zip(other.choice_sources) {
            *a += b;
        }
        for (a, b) in self.cases.iter_mut().zip(other.cases) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingRun {
    pub ordering: CyclicOrdering,
    pub stats: OrderingStats,
}

/// Generous polynomial allowance on basis evaluations: `100 k² r² n`.
pub fn evaluation_budget(n: usize, r: usize, k: usize) -> u64 {
    100 * (k * k * r * r * n) as u64
}

/// Matroid wrapper counting basis and independence queries.
pub struct Counting<'a, M: ?Sized> {
    inner: &'a M,
    calls: Cell<u64>,
}

impl<'a, M: Matroid + ?Sized> Counting<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        Counting { inner, calls: Cell::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

impl<M: Matroid + ?Sized> Matroid for Counting<'_, M> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn full_rank(&self) -> usize {
        self.inner.full_rank()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.calls.set(self.calls.get() + 1);
        self.inner.is_independent(set)
    }
    fn is_basis(&self, set: ElementSet) -> bool {
        self.calls.set(self.calls.get() + 1);
        self.inner.is_basis(set)
    }
}

fn contradiction(message: &str, partition: &[ElementSet]) -> Error {
    Error::InternalContradiction(alloc::boxed::Box::new(Diagnostic {
        message: message.into(),
        partition: partition.to_vec(),
        ..Diagnostic::default()
    }))
}

fn check_partition<M: Matroid + ?Sized>(m: &M, partition: &BasisPartition) -> Result<()> {
    let (n, r, k) = (m.ground_size(), m.full_rank(), partition.k());
    if n != k * r {
        return Err(Error::DimensionMismatch { n, k, r });
    }
    BasisPartition::new(m, partition.bases().to_vec()).map(|_| ())
}

/// Cyclic ordering of the elementary split matroid `rep` in which the parts
/// of `partition` appear as consecutive intervals, in order.
///
/// `k = 1` is trivial and `k = 2` falls back to exhaustive search; `k >= 3`
/// runs the phase construction.
pub fn cyclic_order(
    rep: &SplitRepresentation,
    partition: &BasisPartition,
    options: OrderingOptions,
) -> Result<OrderingRun> {
    check_partition(rep, partition)?;
    let bases = partition.bases();
    let (r, k) = (rep.r(), partition.k());
    let run = match k {
        0 => OrderingRun { ordering: CyclicOrdering::new(Vec::new(), Vec::new()), stats: OrderingStats::default() },
        1 => OrderingRun {
            ordering: CyclicOrdering::with_uniform_blocks(bases[0].iter().collect(), r),
            stats: OrderingStats::default(),
        },
        2 => {
            let counting = Counting::new(rep);
            let ordering = brute_force_cyclic_ordering(&counting, Some(bases))
                .ok_or_else(|| contradiction("no interval ordering exists for k = 2", bases))?;
            let stats = OrderingStats { basis_evaluations: counting.calls(), ..OrderingStats::default() };
            OrderingRun { ordering, stats }
        }
        _ => run_phases(rep, partition, options)?,
    };
    if let Err(defect) = check_cyclic_ordering(rep, &run.ordering, Some(bases)) {
        return Err(contradiction(&alloc::format!("final ordering fails verification: {defect}"), bases));
    }
    Ok(run)
}

fn run_phases(rep: &SplitRepresentation, partition: &BasisPartition, options: OrderingOptions) -> Result<OrderingRun> {
    let mut state = OrderingState::new(rep, partition)?;
    let mut stats = OrderingStats::default();
    let (r, k) = (rep.r(), partition.k());
    for _ in 0..r {
        let (choice, source) = choose_next(&mut state, &mut stats, options)?;
        state.place(&choice);
        stats.phases += 1;
        stats.choice_sources[source as usize] += 1;
        if let Some((i, l)) = state.star_violation() {
            return Err(state.contradiction(alloc::format!("window ({i}, {l}) is not a basis after placement")));
        }
        log::trace!("phase {} placed {:?} via {:?}", state.phase() - 1, choice, source);
    }
    stats.basis_evaluations = state.evaluations();
    let order = state.prefixes().iter().flatten().copied().collect();
    let ordering = CyclicOrdering::with_uniform_blocks(order, r);
    debug_assert_eq!(ordering.block_count(), k);
    Ok(OrderingRun { ordering, stats })
}

fn choose_next(
    state: &mut OrderingState<'_>,
    stats: &mut OrderingStats,
    options: OrderingOptions,
) -> Result<(Vec<usize>, ChoiceSource)> {
    let cap = state.k() * state.r();
    for _ in 0..cap.max(1) {
        let chain = match build_p_chain(state)? {
            ChainOutcome::Valid(choice) => return Ok((choice, ChoiceSource::Chain)),
            ChainOutcome::Open(p) => p,
        };
        let cert = match derive_certificate(state, &chain, options)? {
            Derivation::Valid { choice, source } => {
                if !state.is_valid_choice(&choice)? {
                    return Err(state.contradiction(alloc::format!("{source:?} candidate {choice:?} is not valid")));
                }
                return Ok((choice, source));
            }
            Derivation::Stuck(cert) => cert,
        };
        stats.certificates += 1;
        let resolution = resolve_stuck(state, &cert, options)?;
        stats.substitutions += 1;
        stats.cases[resolution.case.index()] += 1;
        if state.is_valid_choice(&resolution.choice)? {
            return Ok((resolution.choice, ChoiceSource::Substitution));
        }
        log::debug!("substitution {:?} did not unlock a choice; retrying", resolution.case);
    }
    Err(state.contradiction(alloc::format!("no valid choice after {cap} substitutions")))
}

/// Like [`cyclic_order`] but for any oracle: direct sums are ordered
/// component by component and recombined, uniform matroids in index order,
/// and graphic or explicit matroids by exhaustive search.
pub fn cyclic_order_oracle(
    m: &MatroidOracle,
    partition: &BasisPartition,
    options: OrderingOptions,
) -> Result<OrderingRun> {
    check_partition(m, partition)?;
    let bases = partition.bases();
    let r = m.full_rank();
    let run = match m {
        MatroidOracle::ElementarySplit(rep) => cyclic_order(rep, partition, options)?,
        MatroidOracle::Uniform(_) => {
            let order = bases.iter().flat_map(|b| b.iter()).collect();
            OrderingRun { ordering: CyclicOrdering::with_uniform_blocks(order, r), stats: OrderingStats::default() }
        }
        MatroidOracle::DirectSum(ds) => {
            let mut stats = OrderingStats::default();
            let mut per_component = Vec::with_capacity(ds.components().len());
            for comp in ds.components() {
                let local_parts = bases.iter().map(|&b| comp.localize(b)).collect();
                let local = BasisPartition::new(&comp.matroid, local_parts)?;
                let run = cyclic_order_oracle(&comp.matroid, &local, options)?;
                stats.merge(&run.stats);
                let blocks: Vec<Vec<usize>> =
                    run.ordering.blocks().map(|b| b.iter().map(|&l| comp.embedding[l]).collect()).collect();
                per_component.push(if blocks.is_empty() { alloc::vec![Vec::new(); bases.len()] } else { blocks });
            }
            OrderingRun { ordering: compose_component_orderings(&per_component, bases.len())?, stats }
        }
        MatroidOracle::Graphic(_) | MatroidOracle::ExplicitBases(_) => {
            let counting = Counting::new(m);
            let ordering = brute_force_cyclic_ordering(&counting, Some(bases))
                .ok_or_else(|| contradiction("exhaustive search found no interval ordering", bases))?;
            OrderingRun { ordering, stats: OrderingStats { basis_evaluations: counting.calls(), ..Default::default() } }
        }
    };
    if let Err(defect) = check_cyclic_ordering(m, &run.ordering, Some(bases)) {
        return Err(contradiction(&alloc::format!("final ordering fails verification: {defect}"), bases));
    }
    Ok(run)
}

#[cfg(test)]
mod tests;
