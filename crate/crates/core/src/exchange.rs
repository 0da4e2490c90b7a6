//! Symmetric and cyclic exchanges on sequences of bases, and shortest
//! exchange sequences between compatible sequences on small instances.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::ordering::{check_cyclic_ordering, CyclicOrdering};
use crate::set::ElementSet;

/// An ordered sequence of bases; members may overlap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisSequence(Vec<ElementSet>);

impl BasisSequence {
    pub fn new<M: Matroid + ?Sized>(m: &M, bases: Vec<ElementSet>) -> Result<Self> {
        if let Some(i) = bases.iter().position(|&b| !m.is_basis(b)) {
            return Err(Error::InvalidInput(format!("member {i} of the sequence is not a basis")));
        }
        Ok(BasisSequence(bases))
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(B_2, .., B_k, B_1)`.
    pub fn rotated(&self) -> BasisSequence {
        let mut bases = self.0.clone();
        if !bases.is_empty() {
            bases.rotate_left(1);
        }
        BasisSequence(bases)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExchangeMove {
    /// `e ∈ B_i` and `f ∈ B_j` change places.
    Symmetric { i: usize, j: usize, e: usize, f: usize },
    /// `B_{indices[t]}` loses `elements[t]` and gains `elements[t + 1]`
    /// (cyclically).
    Cyclic { indices: Vec<usize>, elements: Vec<usize> },
}

impl ExchangeMove {
    /// Positions and elements in cyclic form.
    fn cycle(&self) -> (Vec<usize>, Vec<usize>) {
        match self {
            ExchangeMove::Symmetric { i, j, e, f } => (alloc::vec![*i, *j], alloc::vec![*e, *f]),
            ExchangeMove::Cyclic { indices, elements } => (indices.clone(), elements.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeKind {
    Symmetric,
    Cyclic,
}

/// Applies `mv`, failing with `IllegalMove` when it is malformed or a
/// resulting set is not a basis.
pub fn apply_move<M: Matroid + ?Sized>(m: &M, seq: &BasisSequence, mv: &ExchangeMove) -> Result<BasisSequence> {
    let (indices, elements) = mv.cycle();
    let q = indices.len();
    if q == 0 || elements.len() != q {
        return Err(Error::IllegalMove("a move needs one element per index".into()));
    }
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    if distinct.len() != q || indices.iter().any(|&i| i >= seq.len()) {
        return Err(Error::IllegalMove(format!("indices {indices:?} are not distinct positions of the sequence")));
    }
    let mut out = seq.0.clone();
    for t in 0..q {
        let (i, e, f) = (indices[t], elements[t], elements[(t + 1) % q]);
        let from = seq.0[i];
        if !from.contains(e) {
            return Err(Error::IllegalMove(format!("element {e} is not in member {i}")));
        }
        let to = from.without(e).with(f);
        if !m.is_basis(to) {
            return Err(Error::IllegalMove(format!("member {i} would become {to:?}, not a basis")));
        }
        out[i] = to;
    }
    Ok(BasisSequence(out))
}

/// Whether the two sequences have the same length and the same union as
/// multisets.
pub fn compatible(a: &BasisSequence, b: &BasisSequence) -> bool {
    let counts = |s: &BasisSequence| {
        let mut c = [0u32; crate::set::MAX_ELEMENTS];
        for e in s.0.iter().flat_map(|b| b.iter()) {
            c[e] += 1;
        }
        c
    };
    a.len() == b.len() && counts(a) == counts(b)
}

/// Every legal move from `seq`. Cyclic moves list each cycle once, starting
/// at its smallest index, and use between 2 and `k` members.
pub fn legal_moves<M: Matroid + ?Sized>(m: &M, seq: &BasisSequence, kind: ExchangeKind) -> Vec<(ExchangeMove, BasisSequence)> {
    let k = seq.len();
    let mut out = Vec::new();
    match kind {
        ExchangeKind::Symmetric => {
            for i in 0..k {
                for j in i + 1..k {
                    for e in seq.0[i] - seq.0[j] {
                        for f in seq.0[j] - seq.0[i] {
                            let mv = ExchangeMove::Symmetric { i, j, e, f };
                            if let Ok(next) = apply_move(m, seq, &mv) {
                                out.push((mv, next));
                            }
                        }
                    }
                }
            }
        }
        ExchangeKind::Cyclic => {
            for first in 0..k {
                for e in seq.0[first].iter() {
                    let mut indices = alloc::vec![first];
                    let mut elements = alloc::vec![e];
                    grow_cycle(m, seq, &mut indices, &mut elements, &mut out);
                }
            }
        }
    }
    out
}

fn grow_cycle<M: Matroid + ?Sized>(
    m: &M,
    seq: &BasisSequence,
    indices: &mut Vec<usize>,
    elements: &mut Vec<usize>,
    out: &mut Vec<(ExchangeMove, BasisSequence)>,
) {
    let k = seq.len();
    let last_i = *indices.last().unwrap();
    let last_e = *elements.last().unwrap();
    let shrunk = seq.0[last_i].without(last_e);
    for i in indices[0] + 1..k {
        if indices.contains(&i) {
            continue;
        }
        for f in seq.0[i] - shrunk {
            if !m.is_basis(shrunk.with(f)) {
                continue;
            }
            indices.push(i);
            elements.push(f);
            if m.is_basis(seq.0[i].without(f).with(elements[0])) {
                let mv = ExchangeMove::Cyclic { indices: indices.clone(), elements: elements.clone() };
                if let Ok(next) = apply_move(m, seq, &mv) {
                    out.push((mv, next));
                }
            }
            if indices.len() < k {
                grow_cycle(m, seq, indices, elements, out);
            }
            indices.pop();
            elements.pop();
        }
    }
}

/// Fewest moves of `kind` turning `a` into `b`, or `None` if `b` is
/// unreachable. Breadth-first over whole sequences; meant for small
/// instances.
pub fn exchange_distance<M: Matroid + ?Sized>(
    m: &M,
    a: &BasisSequence,
    b: &BasisSequence,
    kind: ExchangeKind,
) -> Result<Option<usize>> {
    if !compatible(a, b) {
        return Err(Error::IncompatibleSequences);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(a.clone());
    queue.push_back((a.clone(), 0usize));
    while let Some((seq, dist)) = queue.pop_front() {
        if &seq == b {
            return Ok(Some(dist));
        }
        for (_, next) in legal_moves(m, &seq, kind) {
            if seen.insert(next.clone()) {
                queue.push_back((next, dist + 1));
            }
        }
    }
    Ok(None)
}

/// Non-negative finite element weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(e) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(format!("weight of element {e} is not a non-negative number")));
        }
        Ok(Weights(weights))
    }

    pub fn zero(n: usize) -> Self {
        Weights(alloc::vec![0.0; n])
    }

    pub fn get(&self, e: usize) -> f64 {
        self.0.get(e).copied().unwrap_or(0.0)
    }

    pub fn of_set(&self, set: ElementSet) -> f64 {
        set.iter().map(|e| self.get(e)).sum()
    }
}

/// Symmetric: `w(e)/2 + w(f)/2`. Cyclic: the moved weight divided by the
/// sequence length `k`.
pub fn move_weight(mv: &ExchangeMove, w: &Weights, k: usize) -> f64 {
    match mv {
        ExchangeMove::Symmetric { e, f, .. } => w.get(*e) / 2.0 + w.get(*f) / 2.0,
        ExchangeMove::Cyclic { elements, .. } => {
            if k == 0 {
                0.0
            } else {
                elements.iter().map(|&e| w.get(e)).sum::<f64>() / k as f64
            }
        }
    }
}

#[derive(PartialEq)]
struct Frontier(f64, BasisSequence);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Least total move weight turning `a` into `b` (Dijkstra over the same
/// move graph as [`exchange_distance`]).
pub fn min_exchange_weight<M: Matroid + ?Sized>(
    m: &M,
    a: &BasisSequence,
    b: &BasisSequence,
    kind: ExchangeKind,
    w: &Weights,
) -> Result<Option<f64>> {
    if !compatible(a, b) {
        return Err(Error::IncompatibleSequences);
    }
    let k = a.len();
    let mut best: BTreeMap<BasisSequence, f64> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(a.clone(), 0.0);
    heap.push(Frontier(0.0, a.clone()));
    while let Some(Frontier(cost, seq)) = heap.pop() {
        if &seq == b {
            return Ok(Some(cost));
        }
        if best.get(&seq).is_some_and(|&c| c < cost) {
            continue;
        }
        for (mv, next) in legal_moves(m, &seq, kind) {
            let c = cost + move_weight(&mv, w, k);
            if best.get(&next).is_none_or(|&old| c < old) {
                best.insert(next.clone(), c);
                heap.push(Frontier(c, next));
            }
        }
    }
    Ok(None)
}

/// Reads `r` exchanges off a cyclic ordering with `k` blocks that turn
/// `(B_1, .., B_k)` into `(B_2, .., B_k, B_1)`. Step `t` moves the `t`-th
/// element of every block to the previous block, so every intermediate
/// member is a window of the ordering. For `k = 2` the steps are symmetric
/// exchanges.
pub fn ordering_to_exchange_script<M: Matroid + ?Sized>(
    m: &M,
    ordering: &CyclicOrdering,
    k: usize,
) -> Result<Vec<ExchangeMove>> {
    if k < 2 || ordering.block_count() != k {
        return Err(Error::BlockCountMismatch { expected: k, found: ordering.block_count() });
    }
    check_cyclic_ordering(m, ordering, None)
        .map_err(|defect| Error::InvalidInput(format!("ordering does not verify: {defect}")))?;
    let r = m.full_rank();
    let blocks: Vec<&[usize]> = ordering.blocks().collect();
    let script: Vec<ExchangeMove> = (0..r)
        .map(|t| {
            if k == 2 {
                ExchangeMove::Symmetric { i: 0, j: 1, e: blocks[0][t], f: blocks[1][t] }
            } else {
                ExchangeMove::Cyclic { indices: (0..k).collect(), elements: blocks.iter().map(|b| b[t]).collect() }
            }
        })
        .collect();
    let start = BasisSequence(ordering.block_sets());
    let mut seq = start.clone();
    for mv in &script {
        seq = apply_move(m, &seq, mv).map_err(|e| {
            Error::InternalContradiction(alloc::boxed::Box::new(crate::error::Diagnostic {
                message: format!("intermediate exchange failed although it is a window: {e}"),
                partition: start.0.clone(),
                ..Default::default()
            }))
        })?;
    }
    assert_eq!(seq, start.rotated(), "script must rotate the sequence");
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sparse_paving_6, uniform_2_6};
    use crate::matroid::Uniform;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().collect()
    }

    #[test]
    fn symmetric_swap_on_uniform() {
        let m = Uniform::new(4, 2).unwrap();
        let seq = BasisSequence::new(&m, vec![set(&[0, 1]), set(&[2, 3])]).unwrap();
        let out = apply_move(&m, &seq, &ExchangeMove::Symmetric { i: 0, j: 1, e: 0, f: 2 }).unwrap();
        assert_eq!(out.bases(), &[set(&[1, 2]), set(&[0, 3])]);
        assert_eq!(exchange_distance(&m, &seq, &seq.rotated(), ExchangeKind::Symmetric).unwrap(), Some(2));
        assert_eq!(exchange_distance(&m, &seq, &seq, ExchangeKind::Symmetric).unwrap(), Some(0));
    }

    #[test]
    fn three_cycle_on_sparse_paving() {
        let m = sparse_paving_6();
        let seq = BasisSequence::new(&m, vec![set(&[0, 2]), set(&[1, 4]), set(&[3, 5])]).unwrap();
        let mv = ExchangeMove::Cyclic { indices: vec![0, 1, 2], elements: vec![0, 1, 3] };
        let out = apply_move(&m, &seq, &mv).unwrap();
        assert_eq!(out.bases(), &[set(&[1, 2]), set(&[3, 4]), set(&[0, 5])]);
        let bad = ExchangeMove::Symmetric { i: 0, j: 1, e: 2, f: 1 };
        assert!(matches!(apply_move(&m, &seq, &bad), Err(Error::IllegalMove(_))));
        assert_eq!(exchange_distance(&m, &seq, &seq.rotated(), ExchangeKind::Cyclic).unwrap(), Some(2));
    }

    #[test]
    fn compatibility_is_multiset_equality() {
        let m = Uniform::new(5, 2).unwrap();
        let seq = |xs: &[&[usize]]| BasisSequence::new(&m, xs.iter().map(|x| set(x)).collect()).unwrap();
        assert!(compatible(&seq(&[&[0, 1], &[2, 3]]), &seq(&[&[2, 3], &[0, 1]])));
        assert!(!compatible(&seq(&[&[0, 1], &[2, 3]]), &seq(&[&[0, 1], &[2, 4]])));
        assert!(compatible(&seq(&[&[0, 1], &[0, 2]]), &seq(&[&[0, 2], &[0, 1]])));
        assert!(!compatible(&seq(&[&[0, 1], &[0, 2]]), &seq(&[&[0, 1], &[1, 2]])));
        assert!(matches!(
            exchange_distance(&m, &seq(&[&[0, 1]]), &seq(&[&[0, 2]]), ExchangeKind::Symmetric),
            Err(Error::IncompatibleSequences)
        ));
    }

    #[test]
    fn weights() {
        let w = Weights::new(vec![2.0, 4.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(move_weight(&ExchangeMove::Symmetric { i: 0, j: 1, e: 0, f: 1 }, &w, 2), 3.0);
        let cyc = ExchangeMove::Cyclic { indices: vec![0, 1, 2], elements: vec![2, 3, 4] };
        assert_eq!(move_weight(&cyc, &w, 3), 2.0);
        assert_eq!(move_weight(&cyc, &Weights::zero(5), 3), 0.0);
        assert!(Weights::new(vec![-1.0]).is_err());
    }

    #[test]
    fn scripts_rotate() {
        let m = uniform_2_6();
        let two = CyclicOrdering::with_uniform_blocks(vec![0, 1, 2, 3], 2);
        let u4 = Uniform::new(4, 2).unwrap();
        assert_eq!(ordering_to_exchange_script(&u4, &two, 2).unwrap().len(), 2);
        let three = CyclicOrdering::with_uniform_blocks(vec![0, 2, 1, 4, 3, 5], 2);
        let script = ordering_to_exchange_script(&sparse_paving_6(), &three, 3).unwrap();
        assert_eq!(script.len(), 2);
        assert!(ordering_to_exchange_script(&m, &three, 2).is_err());
    }

    #[test]
    fn weighted_distance_on_swap() {
        let m = Uniform::new(4, 2).unwrap();
        let seq = BasisSequence::new(&m, vec![set(&[0, 1]), set(&[2, 3])]).unwrap();
        let w = Weights::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let best = min_exchange_weight(&m, &seq, &seq.rotated(), ExchangeKind::Symmetric, &w).unwrap();
        assert_eq!(best, Some(2.0));
    }
}
