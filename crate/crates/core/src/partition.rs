//! Matroid union: packing the ground set into `k` independent sets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::set::{all_subsets, ElementSet};

/// Ground sets up to this size are tested for uniform density by
/// enumerating subsets.
pub const DENSITY_ENUMERATION_LIMIT: usize = 20;

/// A partition of the ground set into pairwise disjoint bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPartition {
    bases: Vec<ElementSet>,
}

impl BasisPartition {
    /// Checks disjointness, coverage and that every part is a basis.
    pub fn new<M: Matroid + ?Sized>(m: &M, bases: Vec<ElementSet>) -> Result<Self> {
        let ground = m.ground_set();
        let mut seen = ElementSet::EMPTY;
        for (i, &b) in bases.iter().enumerate() {
            if let Some(e) = (b - ground).first() {
                return Err(Error::ElementOutOfRange { element: e, n: m.ground_size() });
            }
            if let Some(e) = (b & seen).first() {
                return Err(Error::InvalidPartition(format!("element {e} appears in more than one part (part {i})")));
            }
            seen = seen | b;
        }
        if let Some(e) = (ground - seen).first() {
            return Err(Error::InvalidPartition(format!("element {e} lies in no part")));
        }
        for (i, &b) in bases.iter().enumerate() {
            if !m.is_basis(b) {
                return Err(Error::InvalidPartition(format!("part {i} {b:?} is not a basis")));
            }
        }
        Ok(BasisPartition { bases })
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }

    pub fn k(&self) -> usize {
        self.bases.len()
    }

    /// Index of the part containing `e`.
    pub fn part_of(&self, e: usize) -> Option<usize> {
        self.bases.iter().position(|b| b.contains(e))
    }
}

/// `k` independent sets grown by shortest augmenting paths, each element
/// used by at most `copies` of them.
///
/// Nodes of the exchange graph are (element, holder) pairs, where the holder
/// is a set index or `k` for the copy being inserted.
struct UnionPacking<'m, M: ?Sized> {
    m: &'m M,
    sets: Vec<ElementSet>,
    copies: usize,
    used: Vec<usize>,
}

impl<'m, M: Matroid + ?Sized> UnionPacking<'m, M> {
    fn new(m: &'m M, k: usize, copies: usize) -> Self {
        UnionPacking { m, sets: alloc::vec![ElementSet::EMPTY; k], copies, used: alloc::vec![0; m.ground_size()] }
    }

    fn node(&self, e: usize, holder: usize) -> usize {
        e * (self.sets.len() + 1) + holder
    }

    /// Puts every copy into the first set that stays independent.
    fn greedy(&mut self) {
        for e in 0..self.m.ground_size() {
            for i in 0..self.sets.len() {
                if self.used[e] == self.copies {
                    break;
                }
                let s = self.sets[i];
                if !s.contains(e) && self.m.is_independent(s.with(e)) {
                    self.sets[i].insert(e);
                    self.used[e] += 1;
                }
            }
        }
    }

    /// Inserts one more copy of `x` along a shortest path in the exchange
    /// graph. Returns false if no augmenting path exists.
    fn augment(&mut self, x: usize) -> bool {
        let k = self.sets.len();
        let mut prev: Vec<Option<(usize, usize)>> = alloc::vec![None; self.m.ground_size() * (k + 1)];
        let mut visited = alloc::vec![false; prev.len()];
        visited[self.node(x, k)] = true;
        let mut queue = alloc::collections::VecDeque::from([(x, k)]);
        let mut sink = None;
        'bfs: while let Some((y, holder)) = queue.pop_front() {
            for i in 0..k {
                let s = self.sets[i];
                if i == holder || s.contains(y) {
                    continue;
                }
                if self.m.is_independent(s.with(y)) {
                    sink = Some((y, holder, i));
                    break 'bfs;
                }
                for z in s {
                    let id = self.node(z, i);
                    if !visited[id] && self.m.is_independent(s.without(z).with(y)) {
                        visited[id] = true;
                        prev[id] = Some((y, holder));
                        queue.push_back((z, i));
                    }
                }
            }
        }
        let Some((mut y, mut holder, mut dest)) = sink else {
            return false;
        };
        // Walk back: each element moves into the set it was linked to and
        // its predecessor takes the vacated slot.
        loop {
            self.sets[dest].insert(y);
            if holder == k {
                self.used[y] += 1;
                break;
            }
            self.sets[holder].remove(y);
            let (p, p_holder) = prev[self.node(y, holder)].expect("path reaches the inserted copy");
            dest = holder;
            y = p;
            holder = p_holder;
        }
        debug_assert!(self.sets.iter().all(|&s| self.m.is_independent(s)));
        true
    }

    /// Greedy start followed by augmentation of every missing copy.
    fn pack_all(&mut self) -> bool {
        self.greedy();
        for e in 0..self.m.ground_size() {
            while self.used[e] < self.copies {
                if !self.augment(e) {
                    return false;
                }
            }
        }
        true
    }
}

/// Partitions the ground set into `k` disjoint bases, if possible.
pub fn partition_into_bases<M: Matroid + ?Sized>(m: &M, k: usize) -> Result<Option<BasisPartition>> {
    let (n, r) = (m.ground_size(), m.full_rank());
    if n != k * r {
        return Err(Error::DimensionMismatch { n, k, r });
    }
    let mut packing = UnionPacking::new(m, k, 1);
    if !packing.pack_all() {
        return Ok(None);
    }
    debug_assert!(packing.sets.iter().all(|&b| m.is_basis(b)));
    Ok(Some(BasisPartition { bases: packing.sets }))
}

/// `k` bases whose union is the ground set, if they exist.
pub fn cover_by_bases<M: Matroid + ?Sized>(m: &M, k: usize) -> Option<Vec<ElementSet>> {
    if k == 0 {
        return (m.ground_size() == 0).then(Vec::new);
    }
    let mut packing = UnionPacking::new(m, k, 1);
    if !packing.pack_all() {
        return None;
    }
    let ground = m.ground_set();
    let bases = packing
        .sets
        .into_iter()
        .map(|mut b| {
            for e in ground - b {
                if m.is_independent(b.with(e)) {
                    b.insert(e);
                }
            }
            b
        })
        .collect();
    Some(bases)
}

/// `|S| · r(X) >= r(S) · |X|` for all `X`, by enumeration for small ground
/// sets and by [`uniformly_dense_by_packing`] otherwise.
pub fn is_uniformly_dense<M: Matroid + ?Sized>(m: &M) -> bool {
    if m.ground_size() <= DENSITY_ENUMERATION_LIMIT {
        uniformly_dense_by_enumeration(m)
    } else {
        uniformly_dense_by_packing(m)
    }
}

pub fn uniformly_dense_by_enumeration<M: Matroid + ?Sized>(m: &M) -> bool {
    let (n, r) = (m.ground_size(), m.full_rank());
    all_subsets(n).all(|x| n * m.rank(x) >= r * x.len())
}

/// Whether the ground set is covered by `⌈n/r⌉` bases. Necessary for
/// uniform density, and sufficient when `r` divides `n`.
pub fn uniformly_dense_by_cover<M: Matroid + ?Sized>(m: &M) -> bool {
    let (n, r) = (m.ground_size(), m.full_rank());
    if r == 0 {
        return true;
    }
    cover_by_bases(m, n.div_ceil(r)).is_some()
}

/// Exact test: with `g = gcd(n, r)`, the density inequality is the matroid
/// union condition for `n / g` bases using every element exactly `r / g`
/// times.
pub fn uniformly_dense_by_packing<M: Matroid + ?Sized>(m: &M) -> bool {
    let (n, r) = (m.ground_size(), m.full_rank());
    if r == 0 || n == 0 {
        return true;
    }
    let g = gcd(n, r);
    UnionPacking::new(m, n / g, r / g).pack_all()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
