use alloc::vec::Vec;

use super::CyclicOrdering;
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::set::{subsets_of_size, ElementSet};

struct Search<'m, M: ?Sized> {
    m: &'m M,
    r: usize,
    n: usize,
    /// Allowed elements per position.
    slots: Vec<ElementSet>,
    order: Vec<usize>,
}

impl<M: Matroid + ?Sized> Search<'_, M> {
    /// The `len` elements ending at the last placed position.
    fn trailing(&self, len: usize) -> ElementSet {
        self.order[self.order.len() - len..].iter().collect()
    }

    fn extend(&mut self, used: ElementSet) -> bool {
        let pos = self.order.len();
        if pos == self.n {
            return (0..self.r.saturating_sub(1)).all(|start| {
                let start = self.n - self.r + 1 + start;
                self.m.is_basis((0..self.r).map(|o| self.order[(start + o) % self.n]).collect())
            });
        }
        for e in self.slots[pos] - used {
            self.order.push(e);
            let len = self.order.len().min(self.r);
            let window = self.trailing(len);
            let ok = if len == self.r { self.m.is_basis(window) } else { self.m.is_independent(window) };
            if ok && self.extend(used.with(e)) {
                return true;
            }
            self.order.pop();
        }
        false
    }
}

/// Exhaustive search for a cyclic ordering whose `r`-windows are all
/// bases. With `blocks`, block `i` must occupy the `i`-th interval; the
/// result then carries the block bounds. Returns the lexicographically
/// first solution (unconstrained searches start with the smallest element).
pub fn brute_force_cyclic_ordering<M: Matroid + ?Sized>(
    m: &M,
    blocks: Option<&[ElementSet]>,
) -> Option<CyclicOrdering> {
    let (n, r) = (m.ground_size(), m.full_rank());
    let ground = m.ground_set();
    let (slots, bounds) = match blocks {
        Some(blocks) => {
            let union = blocks.iter().fold(ElementSet::EMPTY, |acc, &b| acc | b);
            let total: usize = blocks.iter().map(|b| b.len()).sum();
            if union != ground || total != n {
                return None;
            }
            let slots = blocks.iter().flat_map(|&b| core::iter::repeat_n(b, b.len())).collect();
            let mut bounds = Vec::with_capacity(blocks.len() + 1);
            bounds.push(0);
            for b in blocks {
                bounds.push(bounds.last().unwrap() + b.len());
            }
            (slots, bounds)
        }
        None => {
            let mut slots = alloc::vec![ground; n];
            if let Some(first) = slots.first_mut() {
                *first = ElementSet::singleton(0);
            }
            (slots, Vec::new())
        }
    };
    if n == 0 {
        return Some(CyclicOrdering::new(Vec::new(), bounds));
    }
    let mut search = Search { m, r, n, slots, order: Vec::with_capacity(n) };
    search.extend(ElementSet::EMPTY).then(|| CyclicOrdering::new(search.order, bounds))
}

/// Whether every `r / g` cyclically consecutive blocks form a basis, where
/// `g` is the common block size.
pub fn block_partition_is_valid<M: Matroid + ?Sized>(m: &M, blocks: &[ElementSet]) -> bool {
    let (n, r) = (m.ground_size(), m.full_rank());
    let Some(g) = blocks.first().map(|b| b.len()) else {
        return n == 0;
    };
    let union = blocks.iter().fold(ElementSet::EMPTY, |acc, &b| acc | b);
    let total: usize = blocks.iter().map(|b| b.len()).sum();
    if g == 0 || total != n || union != m.ground_set() || blocks.iter().any(|b| b.len() != g) || r % g != 0 {
        return false;
    }
    let span = r / g;
    (0..blocks.len()).all(|i| m.is_basis((0..span).fold(ElementSet::EMPTY, |acc, t| acc | blocks[(i + t) % blocks.len()])))
}

/// Exhaustive search for a cyclic sequence of `n / g` blocks of size `g`
/// in which every `r / g` consecutive blocks form a basis. The first block
/// contains element 0.
pub fn find_block_partition<M: Matroid + ?Sized>(m: &M, g: usize) -> Result<Option<Vec<ElementSet>>> {
    let (n, r) = (m.ground_size(), m.full_rank());
    if g == 0 || n % g != 0 || r % g != 0 {
        return Err(Error::Divisibility { g, n, r });
    }
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let count = n / g;
    let span = r / g;
    let mut blocks = Vec::with_capacity(count);
    Ok(extend_blocks(m, g, count, span, ElementSet::EMPTY, &mut blocks).then_some(blocks))
}

fn extend_blocks<M: Matroid + ?Sized>(
    m: &M,
    g: usize,
    count: usize,
    span: usize,
    used: ElementSet,
    blocks: &mut Vec<ElementSet>,
) -> bool {
    let union_of = |range: core::ops::Range<usize>, blocks: &[ElementSet]| {
        range.fold(ElementSet::EMPTY, |acc, t| acc | blocks[t % count])
    };
    if blocks.len() == count {
        return (count - span + 1..count).all(|start| m.is_basis(union_of(start..start + span, blocks)));
    }
    let free = m.ground_set() - used;
    let free_list: Vec<usize> = free.iter().collect();
    for pick in subsets_of_size(free_list.len(), g) {
        let block: ElementSet = pick.iter().map(|i| free_list[i]).collect();
        if blocks.is_empty() && !block.contains(0) {
            continue;
        }
        blocks.push(block);
        let len = blocks.len();
        let trail = union_of(len.saturating_sub(span)..len, blocks);
        let ok = if len >= span { m.is_basis(trail) } else { m.is_independent(trail) };
        if ok && extend_blocks(m, g, count, span, used | block, blocks) {
            return true;
        }
        blocks.pop();
    }
    false
}
