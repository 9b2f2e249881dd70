//! GF(2) vectors and matrices, exact binomials, and k-subset enumeration.

mod binomial;
mod bitvec;
mod combinations;
mod matrix;

pub use binomial::{binomial, binomial_row, binomial_signed, binomial_u128};
pub use bitvec::BitVector;
pub use combinations::{
    chunk_ranges, combination_count, for_each_combination, for_each_in_rank_range,
    next_combination, par_fold_chunks, unrank_combination,
};
pub use matrix::BitMatrix;

/// Reduces `v` against an echelon basis built by [`XorBasis::insert`].
///
/// Small helper for packed columns (at most 64 rows) used by the hot loops.
#[derive(Clone, Debug, Default)]
pub struct XorBasis {
    vectors: Vec<u64>,
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Residue of `v` modulo the span; zero iff `v` is in the span.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.vectors {
            // b's leading bit is clear in every later basis vector
            let lead = 63 - b.leading_zeros();
            if (v >> lead) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    /// Inserts `v` if independent; returns whether it was.
    #[inline]
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            false
        } else {
            self.vectors.push(r);
            true
        }
    }

    #[inline]
    pub fn push_reduced(&mut self, r: u64) {
        debug_assert!(r != 0);
        self.vectors.push(r);
    }

    #[inline]
    pub fn pop(&mut self) {
        self.vectors.pop();
    }
}
