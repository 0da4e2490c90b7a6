//! Independence oracles and the reference matroids used to test them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::set::{subsets_of_size, ElementSet, MAX_ELEMENTS};
use crate::split::SplitRepresentation;
use crate::union_find::UnionFind;

/// Independence oracle over the ground set `{0, .., n-1}`.
pub trait Matroid {
    fn ground_size(&self) -> usize;

    /// Rank of the whole ground set.
    fn full_rank(&self) -> usize;

    fn is_independent(&self, set: ElementSet) -> bool;

    fn is_basis(&self, set: ElementSet) -> bool {
        set.len() == self.full_rank() && self.is_independent(set)
    }

    fn ground_set(&self) -> ElementSet {
        ElementSet::full(self.ground_size())
    }

    /// Size of a largest independent subset of `set`, by greedy
    /// augmentation in index order.
    fn rank(&self, set: ElementSet) -> usize {
        greedy_independent(self, set).len()
    }
}

/// A maximal independent subset of `set`, scanning members in index order.
pub fn greedy_independent<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> ElementSet {
    let mut acc = ElementSet::EMPTY;
    let r = m.full_rank();
    for e in set {
        if acc.len() == r {
            break;
        }
        if m.is_independent(acc.with(e)) {
            acc.insert(e);
        }
    }
    acc
}

/// `{f ∈ pool : B - e + f is a basis}`.
///
/// Panics if `basis` is not a basis, `e ∉ basis`, or `pool` meets `basis`.
pub fn exchange_candidates<M: Matroid + ?Sized>(
    m: &M,
    basis: ElementSet,
    e: usize,
    pool: ElementSet,
) -> ElementSet {
    assert!(m.is_basis(basis), "exchange_candidates: {basis:?} is not a basis");
    assert!(basis.contains(e), "exchange_candidates: {e} is not in {basis:?}");
    assert!(pool.is_disjoint(basis), "exchange_candidates: pool meets the basis");
    let rest = basis.without(e);
    pool.iter().filter(|&f| m.is_basis(rest.with(f))).collect()
}

fn check_ground(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        Err(Error::GroundSetTooLarge { n })
    } else {
        Ok(())
    }
}

/// The uniform matroid `U_{r,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uniform {
    n: usize,
    r: usize,
}

impl Uniform {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        check_ground(n)?;
        if r > n {
            return Err(Error::RankExceedsGroundSet { r, n });
        }
        Ok(Uniform { n, r })
    }
}

impl Matroid for Uniform {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn full_rank(&self) -> usize {
        self.r
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        set.len() <= self.r
    }
}

/// Cycle matroid of a multigraph; element `i` is `edges[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graphic {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    rank: usize,
}

impl Graphic {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_ground(edges.len())?;
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) references a vertex outside 0..{vertices}"
            )));
        }
        let mut g = Graphic { vertices, edges, rank: usize::MAX };
        g.rank = greedy_independent(&g, ElementSet::full(g.edges.len())).len();
        Ok(g)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

impl Matroid for Graphic {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn full_rank(&self) -> usize {
        self.rank
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        set.iter().all(|e| {
            let (u, v) = self.edges[e];
            uf.union(u, v)
        })
    }
}

/// Matroid given by its full list of bases. Meant for small ground-truth
/// instances only; the exchange axiom is not checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitBases {
    n: usize,
    r: usize,
    bases: Vec<ElementSet>,
}

impl ExplicitBases {
    pub fn new(n: usize, mut bases: Vec<ElementSet>) -> Result<Self> {
        check_ground(n)?;
        let Some(r) = bases.first().map(|b| b.len()) else {
            return Err(Error::InvalidInput("explicit basis list is empty".into()));
        };
        let ground = ElementSet::full(n);
        for b in &bases {
            if let Some(e) = (*b - ground).first() {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            if b.len() != r {
                return Err(Error::SizeMismatch { expected: r, found: b.len() });
            }
        }
        bases.sort_unstable();
        bases.dedup();
        Ok(ExplicitBases { n, r, bases })
    }

    /// Enumerates the bases of `m` (exponential; small `n` only).
    pub fn from_matroid<M: Matroid + ?Sized>(m: &M) -> Self {
        let n = m.ground_size();
        let r = m.full_rank();
        let bases = subsets_of_size(n, r).filter(|&x| m.is_basis(x)).collect();
        ExplicitBases { n, r, bases }
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }
}

impl Matroid for ExplicitBases {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn full_rank(&self) -> usize {
        self.r
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        set.len() <= self.r && self.bases.iter().any(|&b| set.is_subset(b))
    }
    fn is_basis(&self, set: ElementSet) -> bool {
        self.bases.binary_search(&set).is_ok()
    }
}

/// One summand of a [`DirectSum`]: a matroid on `{0, .., m-1}` and the
/// global index of each of its elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub matroid: MatroidOracle,
    pub embedding: Vec<usize>,
    /// Image of the embedding.
    pub support: ElementSet,
}

impl Component {
    /// Pulls a global set back to the component's local indices.
    pub fn localize(&self, set: ElementSet) -> ElementSet {
        self.embedding
            .iter()
            .enumerate()
            .filter(|&(_, &g)| set.contains(g))
            .map(|(l, _)| l)
            .collect()
    }

    pub fn globalize(&self, local: ElementSet) -> ElementSet {
        local.iter().map(|l| self.embedding[l]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSum {
    n: usize,
    rank: usize,
    components: Vec<Component>,
}

impl DirectSum {
    pub fn components(&self) -> &[Component] {
        &self.components
    }
}

impl Matroid for DirectSum {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn full_rank(&self) -> usize {
        self.rank
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.components.iter().all(|c| c.matroid.is_independent(c.localize(set)))
    }
    fn is_basis(&self, set: ElementSet) -> bool {
        self.components.iter().all(|c| c.matroid.is_basis(c.localize(set)))
    }
}

/// Builds the direct sum of `components` over a global ground set of size
/// `n`; the embeddings must partition `{0, .., n-1}`.
pub fn direct_sum(n: usize, components: Vec<(MatroidOracle, Vec<usize>)>) -> Result<MatroidOracle> {
    check_ground(n)?;
    let mut covered = ElementSet::EMPTY;
    let mut out = Vec::with_capacity(components.len());
    let mut rank = 0;
    for (idx, (matroid, embedding)) in components.into_iter().enumerate() {
        if embedding.len() != matroid.ground_size() {
            return Err(Error::InvalidEmbedding(format!(
                "component {idx} has {} elements but an embedding of length {}",
                matroid.ground_size(),
                embedding.len()
            )));
        }
        let mut support = ElementSet::EMPTY;
        for &g in &embedding {
            if g >= n {
                return Err(Error::ElementOutOfRange { element: g, n });
            }
            if covered.contains(g) || !support.insert(g) {
                return Err(Error::InvalidEmbedding(format!(
                    "global element {g} is embedded twice (component {idx})"
                )));
            }
        }
        covered = covered | support;
        rank += matroid.full_rank();
        out.push(Component { matroid, embedding, support });
    }
    if let Some(g) = (ElementSet::full(n) - covered).first() {
        return Err(Error::InvalidEmbedding(format!("global element {g} belongs to no component")));
    }
    Ok(MatroidOracle::DirectSum(DirectSum { n, rank, components: out }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatroidKind {
    ElementarySplit,
    Uniform,
    Graphic,
    ExplicitBases,
    DirectSum,
}

/// Any of the supported matroid classes behind one oracle interface.
#[derive(Debug, Clone, PartialEq)]
pub enum MatroidOracle {
    ElementarySplit(SplitRepresentation),
    Uniform(Uniform),
    Graphic(Graphic),
    ExplicitBases(ExplicitBases),
    DirectSum(DirectSum),
}

impl MatroidOracle {
    pub fn kind(&self) -> MatroidKind {
        match self {
            MatroidOracle::ElementarySplit(_) => MatroidKind::ElementarySplit,
            MatroidOracle::Uniform(_) => MatroidKind::Uniform,
            MatroidOracle::Graphic(_) => MatroidKind::Graphic,
            MatroidOracle::ExplicitBases(_) => MatroidKind::ExplicitBases,
            MatroidOracle::DirectSum(_) => MatroidKind::DirectSum,
        }
    }

    fn inner(&self) -> &dyn Matroid {
        match self {
            MatroidOracle::ElementarySplit(m) => m,
            MatroidOracle::Uniform(m) => m,
            MatroidOracle::Graphic(m) => m,
            MatroidOracle::ExplicitBases(m) => m,
            MatroidOracle::DirectSum(m) => m,
        }
    }
}

impl Matroid for MatroidOracle {
    fn ground_size(&self) -> usize {
        self.inner().ground_size()
    }
    fn full_rank(&self) -> usize {
        self.inner().full_rank()
    }
    fn is_independent(&self, set: ElementSet) -> bool {
        self.inner().is_independent(set)
    }
    fn is_basis(&self, set: ElementSet) -> bool {
        self.inner().is_basis(set)
    }
}

impl From<SplitRepresentation> for MatroidOracle {
    fn from(m: SplitRepresentation) -> Self {
        MatroidOracle::ElementarySplit(m)
    }
}

impl From<Uniform> for MatroidOracle {
    fn from(m: Uniform) -> Self {
        MatroidOracle::Uniform(m)
    }
}

impl From<Graphic> for MatroidOracle {
    fn from(m: Graphic) -> Self {
        MatroidOracle::Graphic(m)
    }
}

impl From<ExplicitBases> for MatroidOracle {
    fn from(m: ExplicitBases) -> Self {
        MatroidOracle::ExplicitBases(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::set::all_subsets;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().collect()
    }

    fn all_fixture_oracles() -> Vec<MatroidOracle> {
        alloc::vec![
            fixtures::uniform_2_6().into(),
            fixtures::sparse_paving_6().into(),
            fixtures::example_ten().into(),
            fixtures::k4_graphic().into(),
            fixtures::k4_paving().into(),
        ]
    }

    #[test]
    fn is_basis_examples() {
        // Fixture labels are 1-based in prose, 0-based here.
        assert!(fixtures::uniform_2_6().is_basis(set(&[0, 1])));
        assert!(!fixtures::sparse_paving_6().is_basis(set(&[0, 1])));
        let k4 = fixtures::k4_graphic();
        let triangle = set(&[fixtures::K4_12, fixtures::K4_23, fixtures::K4_13]);
        assert!(!k4.is_basis(triangle));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(fixtures::uniform_2_6().rank(set(&[0, 1, 2])), 2);
        let k4 = fixtures::k4_graphic();
        assert_eq!(k4.rank(set(&[fixtures::K4_12, fixtures::K4_23, fixtures::K4_13])), 2);
        for m in all_fixture_oracles() {
            assert_eq!(m.rank(ElementSet::EMPTY), 0);
        }
    }

    #[test]
    fn exchange_candidate_examples() {
        let u = fixtures::uniform_2_6();
        assert_eq!(exchange_candidates(&u, set(&[0, 1]), 0, set(&[2, 3, 4, 5])), set(&[2, 3, 4, 5]));
        let f2 = fixtures::sparse_paving_6();
        assert_eq!(exchange_candidates(&f2, set(&[0, 2]), 0, set(&[1, 4])), set(&[1, 4]));
        use fixtures::{K4_12, K4_13, K4_23, K4_34};
        let k4 = fixtures::k4_graphic();
        let b = set(&[K4_12, K4_23, K4_34]);
        assert_eq!(exchange_candidates(&k4, b, K4_23, set(&[K4_13])), set(&[K4_13]));
    }

    #[test]
    #[should_panic(expected = "not a basis")]
    fn exchange_candidates_rejects_non_basis() {
        let f2 = fixtures::sparse_paving_6();
        exchange_candidates(&f2, set(&[0, 1]), 0, set(&[2]));
    }

    #[test]
    fn direct_sum_examples() {
        let u12 = || MatroidOracle::from(Uniform::new(2, 1).unwrap());
        let ds = direct_sum(4, alloc::vec![(u12(), alloc::vec![0, 1]), (u12(), alloc::vec![2, 3])]).unwrap();
        assert!(ds.is_basis(set(&[0, 2])));
        assert!(!ds.is_basis(set(&[0, 1])));

        let ds = direct_sum(
            8,
            alloc::vec![
                (fixtures::sparse_paving_6().into(), (0..6).collect()),
                (u12(), alloc::vec![6, 7]),
            ],
        )
        .unwrap();
        assert_eq!(ds.full_rank(), 3);
        assert_eq!(ds.rank(ds.ground_set()), 3);
    }

    #[test]
    fn direct_sum_rejects_bad_embeddings() {
        let u12 = || MatroidOracle::from(Uniform::new(2, 1).unwrap());
        let overlap = direct_sum(3, alloc::vec![(u12(), alloc::vec![0, 1]), (u12(), alloc::vec![1, 2])]);
        assert!(matches!(overlap, Err(Error::InvalidEmbedding(_))));
        let gap = direct_sum(5, alloc::vec![(u12(), alloc::vec![0, 1]), (u12(), alloc::vec![2, 3])]);
        assert!(matches!(gap, Err(Error::InvalidEmbedding(_))));
    }

    #[test]
    fn oracle_axioms_hold_on_fixtures() {
        for m in all_fixture_oracles() {
            let n = m.ground_size();
            let r = m.full_rank();
            assert_eq!(m.rank(m.ground_set()), r);
            let bases: Vec<_> = subsets_of_size(n, r).filter(|&x| m.is_basis(x)).collect();
            assert!(!bases.is_empty());
            // (B2) by exhaustion.
            for &b1 in &bases {
                for &b2 in &bases {
                    for e in b1 - b2 {
                        let ok = (b2 - b1).iter().any(|f| m.is_basis(b1.without(e).with(f)));
                        assert!(ok, "exchange fails for {b1:?} {b2:?} e={e}");
                    }
                }
            }
            for x in all_subsets(n) {
                let indep = m.is_independent(x);
                assert_eq!(m.is_basis(x), x.len() == r && indep);
                // Downward closure: removing any element keeps independence.
                if indep {
                    assert!(x.iter().all(|e| m.is_independent(x.without(e))));
                }
                // Independent iff contained in some basis.
                assert_eq!(indep, bases.iter().any(|&b| x.is_subset(b)), "{x:?}");
            }
        }
    }
}
