//! Fixed-width subsets of a ground set of at most 64 elements.

use core::fmt;
use core::ops::{BitAnd, BitOr, BitXor, Sub};

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 64;

/// A subset of `{0, .., 63}` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    /// The ground set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "ground set of {n} elements exceeds {MAX_ELEMENTS}");
        if n == MAX_ELEMENTS {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_ELEMENTS);
        ElementSet(1u64 << e)
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        e < MAX_ELEMENTS && self.0 & (1u64 << e) != 0
    }

    /// Adds `e`, returning whether it was absent.
    #[inline]
    pub fn insert(&mut self, e: usize) -> bool {
        let fresh = !self.contains(e);
        self.0 |= 1u64 << e;
        fresh
    }

    /// Removes `e`, returning whether it was present.
    #[inline]
    pub fn remove(&mut self, e: usize) -> bool {
        let present = self.contains(e);
        self.0 &= !(1u64 << e);
        present
    }

    /// `self + e`
    #[inline]
    #[must_use]
    pub fn with(self, e: usize) -> Self {
        ElementSet(self.0 | (1u64 << e))
    }

    /// `self - e`
    #[inline]
    #[must_use]
    pub fn without(self, e: usize) -> Self {
        ElementSet(self.0 & !(1u64 << e))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    #[inline]
    pub fn symmetric_difference(self, other: Self) -> Self {
        ElementSet(self.0 ^ other.0)
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Size of `self ∩ other`.
    #[inline]
    pub fn meet(self, other: Self) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    /// Smallest member.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Largest member.
    #[inline]
    pub fn last(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    /// Members in increasing order.
    #[inline]
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }
}

/// Ascending iterator over the members of an [`ElementSet`].
#[derive(Clone, Debug)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for ElementSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ElementSet::EMPTY;
        for e in iter {
            set.insert(e);
        }
        set
    }
}

impl<'a> FromIterator<&'a usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = &'a usize>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl BitOr for ElementSet {
    type Output = ElementSet;
    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

impl BitAnd for ElementSet {
    type Output = ElementSet;
    fn bitand(self, rhs: Self) -> Self {
        self.intersection(rhs)
    }
}

impl BitXor for ElementSet {
    type Output = ElementSet;
    fn bitxor(self, rhs: Self) -> Self {
        self.symmetric_difference(rhs)
    }
}

impl Sub for ElementSet {
    type Output = ElementSet;
    fn sub(self, rhs: Self) -> Self {
        self.difference(rhs)
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All `size`-element subsets of `{0, .., n-1}` in increasing bit order
/// (Gosper's hack).
pub fn subsets_of_size(n: usize, size: usize) -> Combinations {
    assert!(n <= MAX_ELEMENTS);
    let next = if size > n {
        None
    } else if size == 0 {
        Some(0)
    } else {
        Some(ElementSet::full(size).bits())
    };
    Combinations { limit: ElementSet::full(n).bits(), next }
}

#[derive(Clone, Debug)]
pub struct Combinations {
    limit: u64,
    next: Option<u64>,
}

impl Iterator for Combinations {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur.wrapping_add(low);
            if ripple == 0 {
                None
            } else {
                let ones = ((cur ^ ripple) >> 2) / low;
                let nxt = ripple | ones;
                (nxt & !self.limit == 0).then_some(nxt)
            }
        };
        Some(ElementSet(cur))
    }
}

/// Every subset of `{0, .., n-1}`; intended for `n <= 24` or so.
pub fn all_subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    assert!(n < MAX_ELEMENTS);
    (0..(1u64 << n)).map(ElementSet)
}
