//! Seeded random instances.
//!
//! Split representations are grown around a planted partition into `k`
//! blocks of size `r`: a hyperedge is kept only if every block stays a basis
//! and the representation stays valid, so `n = k r` instances always admit a
//! basis partition.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use splitorder_core::{
    direct_sum, partition_into_bases, BasisPartition, ElementSet, Graphic, Hyperedge, MatroidOracle,
    SplitRepresentation, Uniform,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// No hyperedges.
    Uniform,
    /// Hyperedges of size `r` and capacity `r - 1`.
    SparsePaving,
    /// Arbitrary sizes and capacities.
    General,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Uniform, Family::SparsePaving, Family::General];
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub family: Family,
    pub k: usize,
    pub rep: SplitRepresentation,
    pub partition: BasisPartition,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.rep.n()
    }

    pub fn r(&self) -> usize {
        self.rep.r()
    }
}

fn random_hyperedge(rng: &mut ChaCha8Rng, n: usize, r: usize, family: Family, perm: &mut [usize]) -> Hyperedge {
    let (size, capacity) = match family {
        Family::SparsePaving => (r, r - 1),
        _ => {
            let capacity = rng.random_range(0..r);
            (rng.random_range(capacity + 1..=(n - r + capacity).min(n - 1)), capacity)
        }
    };
    perm.shuffle(rng);
    Hyperedge::new(perm[..size].iter().collect(), capacity)
}

/// Split representation on `k r` elements for which `blocks` (consecutive
/// runs of a random permutation) are bases. Returns the blocks too.
pub fn planted_split(
    rng: &mut ChaCha8Rng,
    k: usize,
    r: usize,
    family: Family,
    attempts: usize,
) -> (SplitRepresentation, Vec<ElementSet>) {
    let n = k * r;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let blocks: Vec<ElementSet> = perm.chunks(r).map(|c| c.iter().collect()).collect();
    let mut hyperedges: Vec<Hyperedge> = Vec::new();
    if family != Family::Uniform && r >= 2 {
        for _ in 0..attempts {
            let candidate = random_hyperedge(rng, n, r, family, &mut perm);
            if blocks.iter().any(|b| b.meet(candidate.set) > candidate.capacity) {
                continue;
            }
            hyperedges.push(candidate);
            match SplitRepresentation::new(n, r, hyperedges.clone()) {
                Ok(rep) if rep.hyperedges().len() == hyperedges.len() => {}
                _ => {
                    hyperedges.pop();
                }
            }
        }
    }
    let rep = SplitRepresentation::new(n, r, hyperedges).expect("only valid hyperedges are kept");
    (rep, blocks)
}

/// One instance; the partition is recomputed by matroid union rather than
/// taken from the planted blocks.
pub fn instance(seed: u64, k: usize, r: usize, family: Family) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = 20 * k * r;
    let (rep, _) = planted_split(&mut rng, k, r, family, attempts);
    let partition = partition_into_bases(&rep, k)
        .expect("n = k r by construction")
        .expect("the planted blocks are a partition into bases");
    Instance { seed, family, k, rep, partition }
}

/// Every `(k, r)` with `k in {3, 4, 5}`, `2 <= r <= 6` and `k r <= 30`.
pub fn corpus_shapes() -> Vec<(usize, usize)> {
    let mut shapes = Vec::new();
    for k in 3..=5 {
        for r in 2..=6 {
            if k * r <= 30 {
                shapes.push((k, r));
            }
        }
    }
    shapes
}

/// `size` instances cycling through shapes and families. Instance `i` uses
/// the seed `base_seed + i`.
pub fn corpus(base_seed: u64, size: usize) -> Vec<Instance> {
    let shapes = corpus_shapes();
    (0..size)
        .map(|i| {
            let (k, r) = shapes[i % shapes.len()];
            let family = Family::ALL[(i / shapes.len()) % Family::ALL.len()];
            instance(base_seed + i as u64, k, r, family)
        })
        .collect()
}

/// A random matroid on at most `max_n` elements: an unplanted split
/// representation, a graphic matroid of a random multigraph, or a direct sum
/// of two uniform matroids.
pub fn random_matroid(rng: &mut ChaCha8Rng, max_n: usize) -> MatroidOracle {
    let n = rng.random_range(2..=max_n);
    match rng.random_range(0..3) {
        0 => {
            let r = rng.random_range(1..=n);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut hyperedges = Vec::new();
            if r >= 2 && r < n {
                for _ in 0..3 * n {
                    let family = if rng.random_bool(0.5) { Family::SparsePaving } else { Family::General };
                    hyperedges.push(random_hyperedge(rng, n, r, family, &mut perm));
                    if SplitRepresentation::new(n, r, hyperedges.clone()).is_err() {
                        hyperedges.pop();
                    }
                }
            }
            SplitRepresentation::new(n, r, hyperedges).expect("only valid hyperedges are kept").into()
        }
        1 => {
            let vertices = rng.random_range(2..=6);
            let edges = (0..n)
                .map(|_| {
                    let u = rng.random_range(0..vertices);
                    let v = (u + rng.random_range(1..vertices)) % vertices;
                    (u, v)
                })
                .collect();
            Graphic::new(vertices, edges).expect("edges are in range").into()
        }
        _ => {
            let split = rng.random_range(1..n);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let (left, right) = perm.split_at(split);
            let uniform = |rng: &mut ChaCha8Rng, size: usize| -> MatroidOracle {
                Uniform::new(size, rng.random_range(0..=size)).expect("r <= n").into()
            };
            let parts = vec![(uniform(rng, left.len()), left.to_vec()), (uniform(rng, right.len()), right.to_vec())];
            direct_sum(n, parts).expect("the two parts partition the ground set")
        }
    }
}
