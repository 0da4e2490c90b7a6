use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::error::{Diagnostic, Error, Result};
use crate::matroid::Matroid;
use crate::partition::BasisPartition;
use crate::set::ElementSet;
use crate::split::SplitRepresentation;

/// Partial orderings of the parts `B_0, .., B_{k-1}` at the start of a
/// phase `j` (1-based): every part has `j - 1` ordered elements
/// `b^i_1, .., b^i_{j-1}` and remainder `C_i`.
///
/// The window invariant: for every `i` and `1 <= l <= j`,
/// `{b^i_l, .., b^i_{j-1}} ∪ C_i ∪ {b^{i+1}_1, .., b^{i+1}_{l-1}}` is a basis
/// (part indices are cyclic). At `l = j` this window is
/// `R_i = C_i ∪ {b^{i+1}_1, .., b^{i+1}_{j-1}}`.
#[derive(Debug, Clone)]
pub struct OrderingState<'a> {
    rep: &'a SplitRepresentation,
    bases: Vec<ElementSet>,
    prefixes: Vec<Vec<usize>>,
    prefix_sets: Vec<ElementSet>,
    remainders: Vec<ElementSet>,
    evaluations: Cell<u64>,
}

impl<'a> OrderingState<'a> {
    /// The phase-1 state: nothing ordered yet.
    pub fn new(rep: &'a SplitRepresentation, partition: &BasisPartition) -> Result<Self> {
        let k = partition.k();
        Self::from_prefixes(rep, partition, alloc::vec![Vec::new(); k])
    }

    /// A state with the given ordered prefixes; they must have equal
    /// lengths, lie in their parts and satisfy the window invariant.
    pub fn from_prefixes(
        rep: &'a SplitRepresentation,
        partition: &BasisPartition,
        prefixes: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let partition = BasisPartition::new(rep, partition.bases().to_vec())?;
        let state = Self::new_unchecked(rep, partition.bases().to_vec(), prefixes)?;
        if let Some((i, l)) = state.star_violation() {
            return Err(Error::InvalidInput(alloc::format!("window ({i}, {l}) of the given prefixes is not a basis")));
        }
        state.evaluations.set(0);
        Ok(state)
    }

    /// Checks only the shape of the prefixes, not that the parts are bases
    /// or that the window invariant holds.
    pub fn new_unchecked(rep: &'a SplitRepresentation, bases: Vec<ElementSet>, prefixes: Vec<Vec<usize>>) -> Result<Self> {
        if bases.is_empty() || prefixes.len() != bases.len() {
            return Err(Error::InvalidInput("one prefix per part is required".into()));
        }
        let len = prefixes[0].len();
        let mut prefix_sets = Vec::with_capacity(bases.len());
        let mut remainders = Vec::with_capacity(bases.len());
        for (i, (prefix, &b)) in prefixes.iter().zip(&bases).enumerate() {
            let set: ElementSet = prefix.iter().collect();
            if prefix.len() != len || set.len() != len || !set.is_subset(b) {
                return Err(Error::InvalidInput(alloc::format!("prefix {i} is not a set of {len} elements of its part")));
            }
            prefix_sets.push(set);
            remainders.push(b - set);
        }
        Ok(OrderingState { rep, bases, prefixes, prefix_sets, remainders, evaluations: Cell::new(0) })
    }

    pub fn rep(&self) -> &'a SplitRepresentation {
        self.rep
    }

    pub fn k(&self) -> usize {
        self.bases.len()
    }

    pub fn r(&self) -> usize {
        self.rep.r()
    }

    /// Current phase `j`, 1-based.
    pub fn phase(&self) -> usize {
        self.prefixes[0].len() + 1
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }

    pub fn prefixes(&self) -> &[Vec<usize>] {
        &self.prefixes
    }

    pub fn prefix(&self, i: usize) -> &[usize] {
        &self.prefixes[i]
    }

    pub fn remainder(&self, i: usize) -> ElementSet {
        self.remainders[i]
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        if i + 1 == self.k() {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.k() - 1
        } else {
            i - 1
        }
    }

    /// `R_i = C_i ∪ {b^{i+1}_1, .., b^{i+1}_{j-1}}`.
    #[inline]
    pub fn r_set(&self, i: usize) -> ElementSet {
        self.remainders[i] | self.prefix_sets[self.next(i)]
    }

    /// Window `(i, l)` for `1 <= l <= j`.
    pub fn window(&self, i: usize, l: usize) -> ElementSet {
        debug_assert!(l >= 1 && l <= self.phase());
        let tail: ElementSet = self.prefixes[i][l - 1..].iter().collect();
        let head: ElementSet = self.prefixes[self.next(i)][..l - 1].iter().collect();
        tail | self.remainders[i] | head
    }

    /// Basis test against the representation; counted.
    #[inline]
    pub fn is_basis(&self, x: ElementSet) -> bool {
        self.evaluations.set(self.evaluations.get() + 1);
        self.rep.is_basis(x)
    }

    /// Smallest violated hyperedge of the `r`-set `x`; counted.
    #[inline]
    pub fn violation(&self, x: ElementSet) -> Option<usize> {
        self.evaluations.set(self.evaluations.get() + 1);
        debug_assert_eq!(x.len(), self.r());
        self.rep.violation(x)
    }

    /// First window `(i, l)` that is not a basis.
    pub fn star_violation(&self) -> Option<(usize, usize)> {
        let j = self.phase();
        (0..self.k()).flat_map(|i| (1..=j).map(move |l| (i, l))).find(|&(i, l)| !self.is_basis(self.window(i, l)))
    }

    /// Whether placing `choice[i]` next in every part keeps all windows
    /// bases, i.e. every `R_i - c_i + c_{i+1}` is a basis.
    pub fn is_valid_choice(&self, choice: &[usize]) -> Result<bool> {
        if choice.len() != self.k() {
            return Err(Error::SizeMismatch { expected: self.k(), found: choice.len() });
        }
        if let Some(i) = (0..self.k()).find(|&i| !self.remainders[i].contains(choice[i])) {
            return Err(Error::InvalidInput(alloc::format!(
                "choice element {} is not a remaining element of part {i}",
                choice[i]
            )));
        }
        Ok((0..self.k()).all(|i| self.is_basis(self.r_set(i).without(choice[i]).with(choice[self.next(i)]))))
    }

    pub fn place(&mut self, choice: &[usize]) {
        for (i, &c) in choice.iter().enumerate() {
            debug_assert!(self.remainders[i].contains(c));
            self.prefixes[i].push(c);
            self.prefix_sets[i].insert(c);
            self.remainders[i].remove(c);
        }
    }

    /// Replaces `b^i_{t+1}` (0-based `t`) by the remaining element `x`;
    /// the old element becomes a remaining one.
    pub fn swap_prefix(&mut self, i: usize, t: usize, x: usize) {
        assert!(self.remainders[i].contains(x), "{x} is not a remaining element of part {i}");
        let old = core::mem::replace(&mut self.prefixes[i][t], x);
        self.prefix_sets[i] = self.prefix_sets[i].without(old).with(x);
        self.remainders[i] = self.remainders[i].without(x).with(old);
    }

    pub(crate) fn diagnostic(&self, message: String, certificate: Option<String>) -> Diagnostic {
        Diagnostic {
            message,
            phase: self.phase(),
            partition: self.bases.clone(),
            prefixes: self.prefixes.clone(),
            remainders: self.remainders.clone(),
            certificate,
        }
    }

    pub(crate) fn contradiction(&self, message: String) -> Error {
        Error::InternalContradiction(Box::new(self.diagnostic(message, None)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainOutcome {
    /// `(p_1, .., p_k)` closes up and is a valid choice.
    Valid(Vec<usize>),
    /// The chain `p_1, .., p_k` whose closing window is not a basis.
    Open(Vec<usize>),
}

/// Greedy exchange chain: `p_1 = min C_1`, then `p_{i+1}` is the smallest
/// element of `C_{i+1}` with `R_i - p_i + p_{i+1}` a basis.
pub fn build_p_chain(state: &OrderingState<'_>) -> Result<ChainOutcome> {
    let k = state.k();
    if state.remainder(0).is_empty() {
        return Err(Error::InvalidInput("every element is already ordered".into()));
    }
    if let Some(i) = (0..k).find(|&i| !state.is_basis(state.r_set(i))) {
        return Err(state.contradiction(alloc::format!("R_{i} is not a basis")));
    }
    let mut p = Vec::with_capacity(k);
    p.push(state.remainder(0).first().expect("nonempty"));
    for i in 0..k - 1 {
        let base = state.r_set(i).without(p[i]);
        let next = state.remainder(i + 1).iter().find(|&f| state.is_basis(base.with(f)));
        match next {
            Some(f) => p.push(f),
            None => return Err(state.contradiction(alloc::format!("no exchange partner for p_{i} in part {}", i + 1))),
        }
    }
    let closing = state.r_set(k - 1).without(p[k - 1]).with(p[0]);
    Ok(if state.is_basis(closing) { ChainOutcome::Valid(p) } else { ChainOutcome::Open(p) })
}
