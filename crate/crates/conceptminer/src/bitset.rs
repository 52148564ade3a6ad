//! Dense fixed-capacity index sets backing extents and intents.
//!
//! Everything downstream (derivation operators, rectangle covers, support
//! counting) reduces to intersections, subset tests and popcounts over these,
//! so they are stored as packed 64-bit blocks.

use std::cmp::Ordering;
use std::fmt;

const BLOCK_BITS: usize = 64;

/// Set of object indices. All members are < the context's object count.
pub type ObjectSet = BitSet;
/// Set of property indices. All members are < the context's property count.
pub type PropertySet = BitSet;

/// A set of `usize` indices drawn from a fixed universe `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    nbits: usize,
    blocks: Vec<u64>,
}

impl BitSet {
    /// Empty set over the universe `0..capacity`.
    pub fn new(capacity: usize) -> Self {
        BitSet {
            nbits: capacity,
            blocks: vec![0; capacity.div_ceil(BLOCK_BITS)],
        }
    }

    /// Full set over the universe `0..capacity`.
    pub fn full(capacity: usize) -> Self {
        let mut s = BitSet::new(capacity);
        for (i, block) in s.blocks.iter_mut().enumerate() {
            let lo = i * BLOCK_BITS;
            let in_range = capacity.saturating_sub(lo).min(BLOCK_BITS);
            if in_range == BLOCK_BITS {
                *block = u64::MAX;
            } else if in_range > 0 {
                *block = (1u64 << in_range) - 1;
            }
        }
        s
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(capacity);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.nbits
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.nbits, "index {index} out of range {}", self.nbits);
        self.blocks[index / BLOCK_BITS] |= 1 << (index % BLOCK_BITS);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(index < self.nbits, "index {index} out of range {}", self.nbits);
        self.blocks[index / BLOCK_BITS] &= !(1 << (index % BLOCK_BITS));
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.nbits && self.blocks[index / BLOCK_BITS] & (1 << (index % BLOCK_BITS)) != 0
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn clear(&mut self) {
        self.blocks.iter_mut().for_each(|b| *b = 0);
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    /// Popcount of the intersection without materializing it.
    pub fn intersection_len(&self, other: &BitSet) -> usize {
        debug_assert_eq!(self.nbits, other.nbits);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Indices<'_> {
        Indices {
            set: self,
            block: 0,
            bits: self.blocks.first().copied().unwrap_or(0),
        }
    }
}

/// Iterator over the members of a [`BitSet`], ascending.
pub struct Indices<'a> {
    set: &'a BitSet,
    block: usize,
    bits: u64,
}

impl Iterator for Indices<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.bits == 0 {
            self.block += 1;
            if self.block >= self.set.blocks.len() {
                return None;
            }
            self.bits = self.set.blocks[self.block];
        }
        let low = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(self.block * BLOCK_BITS + low)
    }
}

impl<'a> IntoIterator for &'a BitSet {
    type Item = usize;
    type IntoIter = Indices<'a>;

    fn into_iter(self) -> Indices<'a> {
        self.iter()
    }
}

/// Lexicographic order on the ascending index sequences, so `{0,2} < {1}` and
/// `{1} < {1,2}`. This is the tie-break order used throughout the miners.
impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then_with(|| self.nbits.cmp(&other.nbits))
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
