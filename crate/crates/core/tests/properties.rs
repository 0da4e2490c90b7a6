use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitorder_core::set::subsets_of_size;
use splitorder_core::{
    apply_move, components, cover_by_bases, cyclic_order, exchange_distance, fixtures, legal_moves,
    ordering_to_exchange_script, partition_into_bases, verify_cyclic_ordering, BasisPartition, BasisSequence,
    ElementSet, ExchangeKind, Hyperedge, Matroid, OrderingOptions, SplitRepresentation,
};

/// Random valid representation; when `planted` is set, hyperedges that
/// would break the blocks `{0..r}, {r..2r}, ..` are skipped.
fn random_rep(seed: u64, n: usize, r: usize, planted: bool) -> SplitRepresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut hyperedges = Vec::new();
    if r >= 2 && r < n {
        for _ in 0..4 * n {
            let capacity = rng.random_range(1..r);
            let size = rng.random_range(capacity + 1..=(n - r + capacity).min(n - 1));
            perm.shuffle(&mut rng);
            let h = Hyperedge::new(perm[..size].iter().collect(), capacity);
            if planted && (0..n / r).any(|b| h.set.iter().filter(|e| e / r == b).count() > capacity) {
                continue;
            }
            hyperedges.push(h);
            if SplitRepresentation::new(n, r, hyperedges.clone()).map_or(true, |rep| rep.hyperedges().len() < hyperedges.len()) {
                hyperedges.pop();
            }
        }
    }
    SplitRepresentation::new(n, r, hyperedges).unwrap()
}

/// Bases by direct capacity arithmetic on raw bit masks.
fn bases_by_capacity(rep: &SplitRepresentation) -> Vec<u64> {
    let caps: Vec<(u64, u32)> = rep
        .hyperedges()
        .iter()
        .map(|h| (h.set.iter().fold(0u64, |m, e| m | 1 << e), h.capacity as u32))
        .collect();
    (0u64..1 << rep.n())
        .filter(|x| x.count_ones() as usize == rep.r() && caps.iter().all(|&(h, c)| (x & h).count_ones() <= c))
        .collect()
}

fn mask(set: ElementSet) -> u64 {
    set.iter().fold(0, |m, e| m | 1 << e)
}

fn blocks(n: usize, r: usize) -> Vec<ElementSet> {
    (0..n / r).map(|b| (b * r..(b + 1) * r).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn violation_free_sets_are_the_bases(seed in any::<u64>(), n in 3usize..=10, r in 1usize..=5) {
        prop_assume!(r < n);
        let rep = random_rep(seed, n, r, false);
        let truth = bases_by_capacity(&rep);
        for x in subsets_of_size(n, r) {
            let free = rep.find_violation(x).unwrap().is_none();
            prop_assert_eq!(free, truth.contains(&mask(x)));
        }
    }

    #[test]
    fn validated_representations_satisfy_basis_exchange(seed in any::<u64>(), n in 4usize..=8, r in 2usize..=4) {
        prop_assume!(r < n);
        let rep = random_rep(seed, n, r, false);
        let bases = bases_by_capacity(&rep);
        prop_assert!(!bases.is_empty());
        for &a in &bases {
            for &b in &bases {
                for e in (0..n).filter(|e| (a & !b) >> e & 1 == 1) {
                    let ok = (0..n)
                        .filter(|f| (b & !a) >> f & 1 == 1)
                        .any(|f| bases.contains(&((a & !(1 << e)) | 1 << f)));
                    prop_assert!(ok, "exchange fails for {a:#b}, {b:#b}, {e}");
                }
            }
        }
    }

    #[test]
    fn doubly_tight_bases_lie_between_intersection_and_union(seed in any::<u64>(), n in 4usize..=10, r in 2usize..=5) {
        prop_assume!(r < n);
        let rep = random_rep(seed, n, r, false);
        let count = rep.hyperedges().len();
        for x in subsets_of_size(n, r).filter(|&x| rep.is_basis(x)) {
            for i in 0..count {
                for j in (i + 1)..count {
                    if rep.is_tight(i, x) && rep.is_tight(j, x) {
                        prop_assert!(rep.tight_pair_window(i, j, x));
                    }
                }
            }
        }
    }

    #[test]
    fn component_ranks_add_up(seed in any::<u64>(), n in 2usize..=10, r in 1usize..=5) {
        prop_assume!(r <= n);
        let rep = random_rep(seed, n, r, false);
        let parts = components(&rep);
        let union = parts.iter().fold(ElementSet::EMPTY, |acc, &p| acc | p);
        prop_assert_eq!(union, rep.ground_set());
        prop_assert_eq!(parts.iter().map(|&p| rep.rank(p)).sum::<usize>(), r);
    }

    #[test]
    fn planted_partitions_are_found(seed in any::<u64>(), k in 2usize..=4, r in 2usize..=4) {
        let rep = random_rep(seed, k * r, r, true);
        let partition = partition_into_bases(&rep, k).unwrap().expect("the planted blocks are bases");
        prop_assert_eq!(partition.k(), k);
        prop_assert!(partition.bases().iter().all(|&b| rep.is_basis(b)));
        let cover = cover_by_bases(&rep, k).unwrap();
        prop_assert_eq!(cover.iter().fold(ElementSet::EMPTY, |acc, &b| acc | b), rep.ground_set());
    }

    #[test]
    fn moves_keep_bases_and_distance_is_symmetric(seed in any::<u64>(), r in 2usize..=3) {
        let rep = random_rep(seed, 2 * r, r, true);
        let seq = BasisSequence::new(&rep, blocks(2 * r, r)).unwrap();
        for (mv, next) in legal_moves(&rep, &seq, ExchangeKind::Symmetric) {
            prop_assert!(next.bases().iter().all(|&b| rep.is_basis(b)));
            prop_assert_eq!(apply_move(&rep, &seq, &mv).unwrap(), next.clone());
            let there = exchange_distance(&rep, &seq, &next, ExchangeKind::Symmetric).unwrap();
            let back = exchange_distance(&rep, &next, &seq, ExchangeKind::Symmetric).unwrap();
            prop_assert_eq!(there, Some(1));
            prop_assert_eq!(there, back);
        }
    }

    #[test]
    fn k_scripts_return_to_the_start(seed in any::<u64>(), k in 2usize..=4, r in 2usize..=3) {
        let rep = random_rep(seed, k * r, r, true);
        let partition = BasisPartition::new(&rep, blocks(k * r, r)).unwrap();
        let mut ordering = cyclic_order(&rep, &partition, OrderingOptions::default()).unwrap().ordering;
        let start = BasisSequence::new(&rep, ordering.block_sets()).unwrap();
        let mut seq = start.clone();
        for _ in 0..k {
            let script = ordering_to_exchange_script(&rep, &ordering, k).unwrap();
            prop_assert_eq!(script.len(), r);
            for mv in &script {
                seq = apply_move(&rep, &seq, mv).unwrap();
            }
            ordering = ordering.rotate_blocks();
            prop_assert!(verify_cyclic_ordering(&rep, &ordering, None));
            prop_assert_eq!(seq.bases(), &ordering.block_sets()[..]);
        }
        prop_assert_eq!(seq, start);
    }
}

#[test]
fn fixture_bases_match_capacity_arithmetic() {
    for rep in [fixtures::sparse_paving_6(), fixtures::example_ten(), fixtures::k4_paving()] {
        let truth = bases_by_capacity(&rep);
        let found: Vec<u64> = subsets_of_size(rep.n(), rep.r()).filter(|&x| rep.is_basis(x)).map(mask).collect();
        let mut truth = truth;
        truth.sort_unstable();
        let mut found = found;
        found.sort_unstable();
        assert_eq!(found, truth);
    }
    // The paving form of K4 has exactly the spanning trees as bases.
    let graphic = fixtures::k4_graphic();
    let paving = fixtures::k4_paving();
    for x in subsets_of_size(6, 3) {
        assert_eq!(graphic.is_basis(x), paving.is_basis(x), "{x:?}");
    }
    assert_eq!(subsets_of_size(6, 3).filter(|&x| graphic.is_basis(x)).count(), 16);
}

/// Every sequence reachable by one cyclic exchange, enumerated directly on
/// bit masks: an ordered list of distinct positions, one element from each,
/// position `t` trading its element for the one at `t + 1`.
fn cyclic_successors(bases: &[u64], is_basis: &dyn Fn(u64) -> bool) -> Vec<Vec<u64>> {
    fn walk(
        bases: &[u64],
        is_basis: &dyn Fn(u64) -> bool,
        path: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if path.len() >= 2 {
            let mut next = bases.to_vec();
            let q = path.len();
            for t in 0..q {
                let (i, e) = path[t];
                let (_, incoming) = path[(t + 1) % q];
                next[i] = (bases[i] & !(1 << e)) | 1 << incoming;
            }
            if path.iter().all(|&(i, _)| is_basis(next[i])) {
                out.push(next);
            }
        }
        for i in 0..bases.len() {
            if path.iter().any(|&(j, _)| j == i) {
                continue;
            }
            for e in (0..64).filter(|e| bases[i] >> e & 1 == 1) {
                path.push((i, e));
                walk(bases, is_basis, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(bases, is_basis, &mut Vec::new(), &mut out);
    out
}

#[test]
fn cyclic_distance_can_exceed_rank() {
    // Rank 2 on six elements with parallel pairs {1, 4} and {0, 3}.
    let rep = SplitRepresentation::new(
        6,
        2,
        vec![Hyperedge::new([1, 4].iter().collect(), 1), Hyperedge::new([0, 3].iter().collect(), 1)],
    )
    .unwrap();
    let from = [[0, 2], [1, 3], [4, 5]].map(|b| b.iter().collect::<ElementSet>());
    let to = [[3, 4], [0, 5], [1, 2]].map(|b| b.iter().collect::<ElementSet>());

    let truth = bases_by_capacity(&rep);
    let is_basis = |x: u64| truth.contains(&x);
    let start: Vec<u64> = from.iter().map(|&b| mask(b)).collect();
    let goal: Vec<u64> = to.iter().map(|&b| mask(b)).collect();
    let one = cyclic_successors(&start, &is_basis);
    let two: Vec<Vec<u64>> = one.iter().flat_map(|s| cyclic_successors(s, &is_basis)).collect();
    assert!(!one.contains(&goal) && !two.contains(&goal));
    assert!(two.iter().any(|s| cyclic_successors(s, &is_basis).contains(&goal)));

    let a = BasisSequence::new(&rep, from.to_vec()).unwrap();
    let b = BasisSequence::new(&rep, to.to_vec()).unwrap();
    assert_eq!(exchange_distance(&rep, &a, &b, ExchangeKind::Cyclic).unwrap(), Some(3));
}
