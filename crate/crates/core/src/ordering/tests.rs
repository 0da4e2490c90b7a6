use super::*;
use crate::fixtures::{example_ten, example_ten_blocks, k4_paving, sparse_paving_6, uniform_2_6};
use crate::fixtures::{K4_12, K4_13, K4_14, K4_23, K4_24, K4_34};
use crate::matroid::{direct_sum, Uniform};
use crate::set::subsets_of_size;
use crate::split::Hyperedge;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(xs: &[usize]) -> ElementSet {
    xs.iter().collect()
}

fn f2_partition() -> BasisPartition {
    BasisPartition::new(&sparse_paving_6(), vec![set(&[0, 2]), set(&[1, 4]), set(&[3, 5])]).unwrap()
}

/// Random valid split representation on `k * r` elements in which the
/// blocks of a random partition into `r`-sets are bases.
fn random_split(rng: &mut ChaCha8Rng, k: usize, r: usize, sparse: bool, attempts: usize) -> (SplitRepresentation, BasisPartition) {
    let n = k * r;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let blocks: Vec<ElementSet> = perm.chunks(r).map(|c| c.iter().collect()).collect();
    let mut hyperedges: Vec<Hyperedge> = Vec::new();
    for _ in 0..attempts {
        let (size, cap) = if sparse || r < 2 {
            (r, r.saturating_sub(1))
        } else {
            let cap = rng.random_range(1..r);
            (rng.random_range(cap + 1..=(n - r + cap).min(n - 1)), cap)
        };
        perm.shuffle(rng);
        let candidate = Hyperedge::new(perm[..size].iter().collect(), cap);
        if blocks.iter().any(|b| b.meet(candidate.set) > cap) {
            continue;
        }
        let mut trial = hyperedges.clone();
        trial.push(candidate);
        if let Ok(rep) = SplitRepresentation::new(n, r, trial.clone()) {
            if rep.hyperedges().len() == trial.len() {
                hyperedges = trial;
            }
        }
    }
    let rep = SplitRepresentation::new(n, r, hyperedges).unwrap();
    let partition = BasisPartition::new(&rep, blocks).unwrap();
    (rep, partition)
}

/// Every choice that keeps all windows bases, in lexicographic order.
fn all_valid_choices(state: &OrderingState<'_>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..state.k() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                state.remainder(i).iter().map(move |x| {
                    let mut c = prefix.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out.retain(|c| state.is_valid_choice(c).unwrap());
    out
}

#[test]
fn valid_choice_examples() {
    let rep = sparse_paving_6();
    let state = OrderingState::new(&rep, &f2_partition()).unwrap();
    assert!(state.is_valid_choice(&[0, 1, 3]).unwrap());
    // The last window {3, 2} is a circuit.
    assert!(!state.is_valid_choice(&[2, 4, 5]).unwrap());
    assert!(state.is_valid_choice(&[2, 4, 3]).unwrap());
    assert!(matches!(state.is_valid_choice(&[1, 1, 3]), Err(Error::InvalidInput(_))));
    assert!(matches!(state.is_valid_choice(&[0, 1]), Err(Error::SizeMismatch { .. })));

    let uniform = SplitRepresentation::new(6, 2, vec![]).unwrap();
    let blocks = vec![set(&[0, 1]), set(&[2, 3]), set(&[4, 5])];
    let state = OrderingState::new(&uniform, &BasisPartition::new(&uniform, blocks).unwrap()).unwrap();
    assert_eq!(all_valid_choices(&state).len(), 8);
}

#[test]
fn verifier_examples() {
    let m = sparse_paving_6();
    let blocks = f2_partition().bases().to_vec();
    let good = CyclicOrdering::with_uniform_blocks(vec![0, 2, 1, 4, 3, 5], 2);
    assert!(verify_cyclic_ordering(&m, &good, Some(&blocks)));
    let bad = CyclicOrdering::with_uniform_blocks(vec![0, 1, 2, 4, 3, 5], 2);
    assert_eq!(
        check_cyclic_ordering(&m, &bad, None),
        Err(OrderingDefect::WindowNotBasis { start: 0, window: set(&[0, 1]) })
    );
    let shuffled = CyclicOrdering::with_uniform_blocks(vec![1, 4, 0, 2, 5, 3], 2);
    assert!(verify_cyclic_ordering(&m, &shuffled, None));
    assert!(matches!(check_cyclic_ordering(&m, &shuffled, Some(&blocks)), Err(OrderingDefect::BlockMismatch { .. })));
    let short = CyclicOrdering::with_uniform_blocks(vec![0, 2, 1, 4, 3], 2);
    assert!(matches!(check_cyclic_ordering(&m, &short, None), Err(OrderingDefect::NotPermutation { .. })));

    let u = uniform_2_6();
    for perm in [[0, 1, 2, 3, 4, 5], [5, 3, 1, 0, 2, 4]] {
        assert!(verify_cyclic_ordering(&u, &CyclicOrdering::with_uniform_blocks(perm.to_vec(), 2), None));
    }
}

#[test]
fn orders_small_fixtures() {
    let rep = sparse_paving_6();
    let run = cyclic_order(&rep, &f2_partition(), OrderingOptions { check_deep: true }).unwrap();
    assert!(verify_cyclic_ordering(&rep, &run.ordering, Some(f2_partition().bases())));

    let uniform = SplitRepresentation::new(6, 2, vec![]).unwrap();
    let blocks = vec![set(&[0, 1]), set(&[2, 3]), set(&[4, 5])];
    let run = cyclic_order(&uniform, &BasisPartition::new(&uniform, blocks).unwrap(), OrderingOptions::default()).unwrap();
    assert_eq!(run.ordering.order(), &[0, 1, 2, 3, 4, 5]);
    assert_eq!(run.stats.choice_sources[ChoiceSource::Chain as usize], 2);
}

#[test]
fn two_parts_use_exhaustive_search() {
    let rep = k4_paving();
    let blocks = vec![set(&[K4_12, K4_23, K4_34]), set(&[K4_13, K4_14, K4_24])];
    let partition = BasisPartition::new(&rep, blocks.clone()).unwrap();
    let run = cyclic_order(&rep, &partition, OrderingOptions::default()).unwrap();
    assert!(verify_cyclic_ordering(&rep, &run.ordering, Some(&blocks)));
    assert_eq!(run.ordering.block_bounds(), &[0, 3, 6]);
    let graphic = MatroidOracle::from(crate::fixtures::k4_graphic());
    let run = cyclic_order_oracle(&graphic, &partition, OrderingOptions::default()).unwrap();
    assert!(verify_cyclic_ordering(&graphic, &run.ordering, Some(&blocks)));
}

#[test]
fn single_part_is_trivial() {
    let rep = SplitRepresentation::new(3, 3, vec![]).unwrap();
    let partition = BasisPartition::new(&rep, vec![set(&[0, 1, 2])]).unwrap();
    let run = cyclic_order(&rep, &partition, OrderingOptions::default()).unwrap();
    assert_eq!(run.ordering.order(), &[0, 1, 2]);
}

#[test]
fn rejects_mismatched_dimensions() {
    let rep = sparse_paving_6();
    let u36 = Uniform::new(6, 3).unwrap();
    let partition = BasisPartition::new(&u36, vec![set(&[0, 1, 2]), set(&[3, 4, 5])]).unwrap();
    assert!(matches!(cyclic_order(&rep, &partition, OrderingOptions::default()), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn direct_sum_is_ordered_per_component() {
    // F2 on {0..5} and U_{1,3} on {6,7,8}; rank 3, three parts.
    let sum = direct_sum(
        9,
        vec![
            (MatroidOracle::from(sparse_paving_6()), vec![0, 1, 2, 3, 4, 5]),
            (MatroidOracle::from(Uniform::new(3, 1).unwrap()), vec![6, 7, 8]),
        ],
    )
    .unwrap();
    let blocks = vec![set(&[0, 2, 6]), set(&[1, 4, 7]), set(&[3, 5, 8])];
    let partition = BasisPartition::new(&sum, blocks.clone()).unwrap();
    let run = cyclic_order_oracle(&sum, &partition, OrderingOptions { check_deep: true }).unwrap();
    assert!(verify_cyclic_ordering(&sum, &run.ordering, Some(&blocks)));
}

#[test]
fn rotation_preserves_validity() {
    let m = sparse_paving_6();
    let good = CyclicOrdering::with_uniform_blocks(vec![0, 2, 1, 4, 3, 5], 2);
    let rotated = good.rotate_blocks();
    assert_eq!(rotated.order(), &[1, 4, 3, 5, 0, 2]);
    let blocks = f2_partition().bases().to_vec();
    let mut shifted = blocks.clone();
    shifted.rotate_left(1);
    assert!(verify_cyclic_ordering(&m, &rotated, Some(&shifted)));
}

#[test]
fn example_ten_blocks_admit_no_refinement() {
    let rep = example_ten();
    let blocks = example_ten_blocks();
    assert!(block_partition_is_valid(&rep, &blocks));
    assert_eq!(brute_force_cyclic_ordering(&rep, Some(&blocks)), None);

    // The 32 in-pair orientations, checked directly.
    let mut valid = 0;
    for mask in 0u32..32 {
        let order: Vec<usize> = (0..5)
            .flat_map(|i| if mask >> i & 1 == 0 { [2 * i, 2 * i + 1] } else { [2 * i + 1, 2 * i] })
            .collect();
        if verify_cyclic_ordering(&rep, &CyclicOrdering::new(order, Vec::new()), None) {
            valid += 1;
        }
    }
    assert_eq!(valid, 0);

    let free = brute_force_cyclic_ordering(&rep, None).expect("some cyclic ordering exists");
    assert!(verify_cyclic_ordering(&rep, &free, None));
    let found = find_block_partition(&rep, 2).unwrap().expect("pair blocks exist");
    assert!(block_partition_is_valid(&rep, &found));
}

#[test]
fn block_partition_examples() {
    let u = uniform_2_6();
    assert_eq!(find_block_partition(&u, 2).unwrap(), Some(vec![set(&[0, 1]), set(&[2, 3]), set(&[4, 5])]));
    assert!(matches!(find_block_partition(&u, 4), Err(Error::Divisibility { .. })));
    let not_dense = direct_sum(
        4,
        vec![
            (MatroidOracle::from(Uniform::new(2, 1).unwrap()), vec![0, 1]),
            (MatroidOracle::from(Uniform::new(2, 2).unwrap()), vec![2, 3]),
        ],
    )
    .unwrap();
    assert_eq!(find_block_partition(&not_dense, 1).unwrap(), None);
    assert_eq!(brute_force_cyclic_ordering(&not_dense, None), None);
}

#[test]
fn brute_force_is_lexicographically_first() {
    let m = sparse_paving_6();
    let blocks = f2_partition().bases().to_vec();
    let found = brute_force_cyclic_ordering(&m, Some(&blocks)).unwrap();
    assert_eq!(found.order(), &[0, 2, 1, 4, 3, 5]);
    assert_eq!(found.block_bounds(), &[0, 2, 4, 6]);
    let free = brute_force_cyclic_ordering(&m, None).unwrap();
    assert_eq!(free.order()[0], 0);
    assert!(verify_cyclic_ordering(&m, &free, None));
}

#[test]
fn corrupted_state_is_reported() {
    let rep = sparse_paving_6();
    // {0,1} is a circuit, so the first remainder is not a basis.
    let state = OrderingState::new_unchecked(&rep, vec![set(&[0, 1]), set(&[2, 4]), set(&[3, 5])], vec![vec![]; 3]).unwrap();
    assert!(matches!(build_p_chain(&state), Err(Error::InternalContradiction(_))));
}

#[test]
fn prefixes_violating_windows_are_rejected() {
    let rep = sparse_paving_6();
    // With 0 and 1 placed first, the window {2} ∪ {1} is fine but
    // {0} ∪ ... is checked as well; (2, 1) placement puts {0,1} together.
    let err = OrderingState::from_prefixes(&rep, &f2_partition(), vec![vec![2], vec![1], vec![3]]);
    assert!(matches!(err, Err(Error::InvalidInput(_))));
    assert!(OrderingState::from_prefixes(&rep, &f2_partition(), vec![vec![0], vec![1], vec![3]]).is_ok());
}

/// Every reachable state (by valid placements from phase 1) that has no
/// valid choice, visiting at most `budget` states.
fn stuck_states<'a>(state: &OrderingState<'a>, budget: &mut usize, out: &mut Vec<OrderingState<'a>>) {
    if *budget == 0 || state.phase() > state.r() {
        return;
    }
    *budget -= 1;
    let choices = all_valid_choices(state);
    if choices.is_empty() {
        out.push(state.clone());
    }
    for c in choices {
        let mut next = state.clone();
        next.place(&c);
        stuck_states(&next, budget, out);
    }
}

#[derive(Default, Debug)]
struct Coverage {
    stuck: usize,
    cases: [usize; SubstitutionCase::COUNT],
}

fn resolve_all(states: Vec<OrderingState<'_>>, coverage: &mut Coverage) {
    let options = OrderingOptions { check_deep: true };
    for mut state in states {
        let ChainOutcome::Open(p) = build_p_chain(&state).unwrap() else {
            panic!("a stuck state cannot have a closing chain");
        };
        let cert = match derive_certificate(&state, &p, options).unwrap() {
            Derivation::Stuck(cert) => cert,
            Derivation::Valid { choice, .. } => panic!("stuck state produced valid choice {choice:?}"),
        };
        check_certificate(&state, &cert).unwrap();
        assert!(cert.s >= 1 && 3 * cert.s <= state.r());
        let resolution = resolve_stuck(&mut state, &cert, options).unwrap();
        assert!(state.star_violation().is_none());
        assert!(state.is_valid_choice(&resolution.choice).unwrap());
        coverage.stuck += 1;
        coverage.cases[resolution.case.index()] += 1;

        // A wrong second hyperedge list must be caught.
        let mut broken = cert.clone();
        broken.h_prime[0] = broken.h[0];
        assert!(matches!(resolve_stuck(&mut state.clone(), &broken, options), Err(Error::InternalContradiction(_))));
    }
}

#[test]
fn stuck_states_resolve() {
    // Stuck phases need r >= 3; sparse paving instances with three parts of
    // rank 3 reach them for a small fraction of seeds.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut coverage = Coverage::default();
    for _ in 0..3000 {
        let (rep, partition) = random_split(&mut rng, 3, 3, true, 300);
        let mut found = Vec::new();
        stuck_states(&OrderingState::new(&rep, &partition).unwrap(), &mut 5000, &mut found);
        resolve_all(found, &mut coverage);
    }
    println!("stuck states resolved: {}, cases {:?}", coverage.stuck, coverage.cases);
    assert!(coverage.stuck > 0, "the harness should reach at least one stuck state");
}

#[test]
fn valid_choice_matches_full_recheck() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let (rep, partition) = random_split(&mut rng, 3, 3, false, 100);
        let mut state = OrderingState::new(&rep, &partition).unwrap();
        while state.phase() <= rep.r() {
            let k = state.k();
            let mut candidates: Vec<Vec<usize>> = vec![Vec::new()];
            for i in 0..k {
                candidates = candidates
                    .into_iter()
                    .flat_map(|c| {
                        state.remainder(i).iter().map(move |x| c.iter().copied().chain([x]).collect::<Vec<_>>())
                    })
                    .collect();
            }
            let mut valid = Vec::new();
            for c in candidates {
                let mut placed = state.clone();
                placed.place(&c);
                assert_eq!(state.is_valid_choice(&c).unwrap(), placed.star_violation().is_none(), "{c:?}");
                if placed.star_violation().is_none() {
                    valid.push(c);
                }
            }
            let Some(pick) = valid.first() else { break };
            state.place(&pick.clone());
        }
    }
}

#[test]
fn every_subset_window_counts() {
    // Sanity check of the window accessor against a direct construction.
    let rep = sparse_paving_6();
    let state = OrderingState::from_prefixes(&rep, &f2_partition(), vec![vec![0], vec![1], vec![3]]).unwrap();
    assert_eq!(state.window(0, 1), set(&[0, 2]));
    assert_eq!(state.window(0, 2), set(&[2, 1]));
    assert_eq!(state.r_set(2), set(&[5, 0]));
    assert_eq!(subsets_of_size(6, 2).filter(|&x| rep.is_basis(x)).count(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_instances_order(seed in any::<u64>(), k in 3usize..=5, r in 2usize..=5, sparse in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rep, partition) = random_split(&mut rng, k, r, sparse, 60);
        let run = cyclic_order(&rep, &partition, OrderingOptions { check_deep: true }).unwrap();
        prop_assert!(verify_cyclic_ordering(&rep, &run.ordering, Some(partition.bases())));
        prop_assert!(run.stats.basis_evaluations <= evaluation_budget(rep.n(), r, k));
        let rotated = run.ordering.rotate_blocks();
        let mut shifted = partition.bases().to_vec();
        shifted.rotate_left(1);
        prop_assert!(verify_cyclic_ordering(&rep, &rotated, Some(&shifted)));
    }

    #[test]
    fn brute_force_agrees_on_existence(seed in any::<u64>(), r in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rep, partition) = random_split(&mut rng, 3, r, false, 40);
        let brute = brute_force_cyclic_ordering(&rep, Some(partition.bases()));
        prop_assert!(brute.is_some());
        prop_assert!(verify_cyclic_ordering(&rep, brute.as_ref().unwrap(), Some(partition.bases())));
    }
}
