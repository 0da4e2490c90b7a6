//! Elementary split matroids given by a hypergraph with capacities.
//!
//! A representation on `n` elements with rank `r` and hyperedges `H_i`
//! with capacities `r_i` has as bases the `r`-sets `X` with
//! `|X ∩ H_i| <= r_i` for every `i`. It is non-redundant when
//!
//! * `|H_i ∩ H_j| <= r_i + r_j - r` for distinct `i`, `j`   (H1)
//! * `|S - H_i| + r_i >= r`                                  (H2)
//! * `r_i <= r - 1`                                          (H3)
//! * `|H_i| >= r_i + 1`                                      (H4)
//!
//! Under these conditions any `r`-set that is tight (`|F ∩ H_i| = r_i`) for
//! some hyperedge is a basis, and an `r`-set tight for two hyperedges lies
//! between their intersection and their union.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matroid::{greedy_independent, Matroid};
use crate::ordering::CyclicOrdering;
use crate::set::{ElementSet, MAX_ELEMENTS};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    pub set: ElementSet,
    pub capacity: usize,
}

impl Hyperedge {
    pub fn new(set: ElementSet, capacity: usize) -> Self {
        Hyperedge { set, capacity }
    }

    /// Whether the hyperedge constrains no `r`-set.
    pub fn is_vacuous(&self, r: usize) -> bool {
        self.capacity >= r || self.set.len() <= self.capacity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRepresentation {
    n: usize,
    r: usize,
    hyperedges: Vec<Hyperedge>,
}

/// Result of [`normalize_and_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub rep: SplitRepresentation,
    /// Input positions of the hyperedges that were dropped as vacuous.
    pub dropped: Vec<usize>,
}

/// Drops vacuous hyperedges and checks (H1)-(H4) on the survivors.
///
/// Violations are reported with the hyperedges' input positions.
pub fn normalize_and_validate(n: usize, r: usize, raw: Vec<Hyperedge>) -> Result<Normalized> {
    if n > MAX_ELEMENTS {
        return Err(Error::GroundSetTooLarge { n });
    }
    if r > n {
        return Err(Error::RankExceedsGroundSet { r, n });
    }
    let ground = ElementSet::full(n);
    let mut kept: Vec<(usize, Hyperedge)> = Vec::with_capacity(raw.len());
    let mut dropped = Vec::new();
    for (idx, h) in raw.into_iter().enumerate() {
        if let Some(e) = (h.set - ground).first() {
            return Err(Error::ElementOutOfRange { element: e, n });
        }
        if h.is_vacuous(r) {
            dropped.push(idx);
        } else {
            kept.push((idx, h));
        }
    }
    for (a, &(i, hi)) in kept.iter().enumerate() {
        let slack = n - hi.set.len() + hi.capacity;
        if slack < r {
            return Err(Error::H2Violation { i, slack, r });
        }
        for &(j, hj) in &kept[a + 1..] {
            let shared = hi.set.meet(hj.set);
            let bound = hi.capacity as isize + hj.capacity as isize - r as isize;
            if shared as isize > bound {
                return Err(Error::H1Violation { i, j, shared, bound });
            }
        }
    }
    let rep = SplitRepresentation { n, r, hyperedges: kept.into_iter().map(|(_, h)| h).collect() };
    Ok(Normalized { rep, dropped })
}

impl SplitRepresentation {
    /// Normalizes and validates; see [`normalize_and_validate`].
    pub fn new(n: usize, r: usize, hyperedges: Vec<Hyperedge>) -> Result<Self> {
        normalize_and_validate(n, r, hyperedges).map(|nz| nz.rep)
    }

    /// Skips every check. Only for exercising failure paths.
    pub fn new_unchecked(n: usize, r: usize, hyperedges: Vec<Hyperedge>) -> Self {
        SplitRepresentation { n, r, hyperedges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, i: usize) -> &Hyperedge {
        &self.hyperedges[i]
    }

    /// Whether every hyperedge has capacity `r - 1`.
    pub fn is_paving(&self) -> bool {
        self.hyperedges.iter().all(|h| h.capacity + 1 == self.r)
    }

    pub fn is_sparse_paving(&self) -> bool {
        self.is_paving() && self.hyperedges.iter().all(|h| h.set.len() == self.r)
    }

    /// Smallest index of a hyperedge over capacity in the `r`-set `x`.
    pub fn find_violation(&self, x: ElementSet) -> Result<Option<usize>> {
        if x.len() != self.r {
            return Err(Error::SizeMismatch { expected: self.r, found: x.len() });
        }
        Ok(self.violation(x))
    }

    #[inline]
    pub(crate) fn violation(&self, x: ElementSet) -> Option<usize> {
        self.hyperedges.iter().position(|h| x.meet(h.set) > h.capacity)
    }

    /// `|x ∩ H_i| = r_i`.
    #[inline]
    pub fn is_tight(&self, i: usize, x: ElementSet) -> bool {
        let h = &self.hyperedges[i];
        x.meet(h.set) == h.capacity
    }

    /// `H_i ∩ H_j ⊆ f ⊆ H_i ∪ H_j`; always true for `r`-sets tight for two
    /// distinct hyperedges of a valid representation.
    pub fn tight_pair_window(&self, i: usize, j: usize, f: ElementSet) -> bool {
        let (hi, hj) = (self.hyperedges[i].set, self.hyperedges[j].set);
        (hi & hj).is_subset(f) && f.is_subset(hi | hj)
    }
}

impl Matroid for SplitRepresentation {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn full_rank(&self) -> usize {
        self.r
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        set.len() <= self.r && self.hyperedges.iter().all(|h| set.meet(h.set) <= h.capacity)
    }

    fn is_basis(&self, set: ElementSet) -> bool {
        set.len() == self.r && self.violation(set).is_none()
    }
}

/// Connected components of `m`, ordered by smallest element.
///
/// Two elements are joined when one lies in a fixed basis `B`, the other
/// outside it, and swapping them gives another basis. Loops and coloops
/// end up as singletons.
pub fn components<M: Matroid + ?Sized>(m: &M) -> Vec<ElementSet> {
    let n = m.ground_size();
    let basis = greedy_independent(m, m.ground_set());
    let outside = m.ground_set() - basis;
    let mut uf = UnionFind::new(n);
    for e in basis {
        let rest = basis.without(e);
        for f in outside {
            if m.is_independent(rest.with(f)) {
                uf.union(e, f);
            }
        }
    }
    let mut classes: Vec<ElementSet> = Vec::new();
    let mut root_of: Vec<Option<usize>> = alloc::vec![None; n];
    for e in 0..n {
        let root = uf.find(e);
        match root_of[root] {
            Some(c) => {
                classes[c].insert(e);
            }
            None => {
                root_of[root] = Some(classes.len());
                classes.push(ElementSet::singleton(e));
            }
        }
    }
    classes
}

/// Concatenates per-component orderings block by block: block 1 of every
/// component, then block 2 of every component, and so on.
///
/// `orderings[c][i]` is the ordered block of component `c` belonging to the
/// `i`-th basis; every component must have `k` blocks of equal length.
pub fn compose_component_orderings(orderings: &[Vec<Vec<usize>>], k: usize) -> Result<CyclicOrdering> {
    let mut seen = ElementSet::EMPTY;
    for comp in orderings {
        if comp.len() != k {
            return Err(Error::BlockCountMismatch { expected: k, found: comp.len() });
        }
        let width = comp.first().map_or(0, Vec::len);
        for block in comp {
            if block.len() != width {
                return Err(Error::InvalidInput("component blocks have unequal lengths".into()));
            }
            for &e in block {
                if e >= MAX_ELEMENTS || !seen.insert(e) {
                    return Err(Error::InvalidInput(alloc::format!("element {e} repeated or out of range")));
                }
            }
        }
    }
    let mut order = Vec::with_capacity(seen.len());
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(0);
    for i in 0..k {
        for comp in orderings {
            order.extend_from_slice(&comp[i]);
        }
        bounds.push(order.len());
    }
    Ok(CyclicOrdering::new(order, bounds))
}
