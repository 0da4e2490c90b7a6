use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::set::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ground set of {n} elements exceeds the supported maximum of 64")]
    GroundSetTooLarge { n: usize },
    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("rank {r} exceeds ground set size {n}")]
    RankExceedsGroundSet { r: usize, n: usize },
    #[error("h1-violation({i},{j}): hyperedges share {shared} elements, bound is {bound}")]
    H1Violation { i: usize, j: usize, shared: usize, bound: isize },
    #[error("h2-violation({i}): |S - H| + capacity = {slack} < rank {r}")]
    H2Violation { i: usize, slack: usize, r: usize },
    #[error("size-mismatch: expected a set of size {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("dimension-mismatch: n = {n} is not k * r = {k} * {r}")]
    DimensionMismatch { n: usize, k: usize, r: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("block-count mismatch: expected {expected} blocks, found {found}")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("divisibility violation: g = {g} must divide n = {n} and r = {r}")]
    Divisibility { g: usize, n: usize, r: usize },
    #[error("illegal-move: {0}")]
    IllegalMove(String),
    #[error("incompatible-sequences: the multiset unions differ")]
    IncompatibleSequences,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal-contradiction: {0}")]
    InternalContradiction(Box<Diagnostic>),
}

impl Error {
    /// Whether this error reflects a bad input rather than a broken invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::InternalContradiction(_))
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// State captured when the ordering algorithm hits a condition its
/// correctness argument rules out for valid inputs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagnostic {
    pub message: String,
    /// Phase in which the failure occurred (1-based).
    pub phase: usize,
    pub partition: Vec<ElementSet>,
    pub prefixes: Vec<Vec<usize>>,
    pub remainders: Vec<ElementSet>,
    /// Debug rendering of the certificate, if one had been assembled.
    pub certificate: Option<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (phase {})", self.message, self.phase)
    }
}
