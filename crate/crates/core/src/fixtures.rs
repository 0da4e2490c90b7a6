//! Small named instances used throughout the tests and shipped by the CLI.
//!
//! Element `i` here is element `i + 1` in the usual 1-based write-up.

use alloc::vec;
use alloc::vec::Vec;

use crate::matroid::{Graphic, Uniform};
use crate::set::ElementSet;
use crate::split::{Hyperedge, SplitRepresentation};

fn he(members: &[usize], capacity: usize) -> Hyperedge {
    Hyperedge::new(members.iter().collect(), capacity)
}

/// `U_{2,6}`.
pub fn uniform_2_6() -> Uniform {
    Uniform::new(6, 2).expect("valid")
}

/// Rank 2 on six elements with the pairs {1,2}, {3,4}, {5,6} as circuits.
pub fn sparse_paving_6() -> SplitRepresentation {
    SplitRepresentation::new(6, 2, vec![he(&[0, 1], 1), he(&[2, 3], 1), he(&[4, 5], 1)])
        .expect("valid")
}

/// Hyperedges of the ten-element rank-4 sparse paving matroid whose pair
/// blocks `{a_{2i-1}, a_{2i}}` cannot be refined into a cyclic ordering.
pub const EXAMPLE_TEN_HYPEREDGES: [[usize; 4]; 10] = [
    [1, 2, 3, 10],
    [1, 2, 4, 9],
    [1, 3, 4, 5],
    [2, 3, 4, 6],
    [3, 5, 6, 7],
    [4, 5, 6, 8],
    [5, 7, 8, 9],
    [6, 7, 8, 10],
    [1, 7, 9, 10],
    [2, 8, 9, 10],
];

pub fn example_ten() -> SplitRepresentation {
    let hyperedges = EXAMPLE_TEN_HYPEREDGES
        .iter()
        .map(|h| Hyperedge::new(h.iter().map(|&a| a - 1).collect(), 3))
        .collect();
    SplitRepresentation::new(10, 4, hyperedges).expect("valid")
}

/// The pair blocks `G_i = {a_{2i-1}, a_{2i}}`, i = 1..5.
pub fn example_ten_blocks() -> Vec<ElementSet> {
    (0..5).map(|i| ElementSet::from_iter([2 * i, 2 * i + 1])).collect()
}

// Edge indices of K4 on vertices 1..4.
pub const K4_12: usize = 0;
pub const K4_13: usize = 1;
pub const K4_14: usize = 2;
pub const K4_23: usize = 3;
pub const K4_24: usize = 4;
pub const K4_34: usize = 5;

pub const K4_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn k4_graphic() -> Graphic {
    Graphic::new(4, K4_EDGES.to_vec()).expect("valid")
}

/// `M(K4)` as a paving matroid: the four triangles with capacity 2.
pub fn k4_paving() -> SplitRepresentation {
    SplitRepresentation::new(
        6,
        3,
        vec![
            he(&[K4_12, K4_13, K4_23], 2),
            he(&[K4_12, K4_14, K4_24], 2),
            he(&[K4_13, K4_14, K4_34], 2),
            he(&[K4_23, K4_24, K4_34], 2),
        ],
    )
    .expect("valid")
}
