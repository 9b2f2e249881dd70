//! Product code arrays, systematic encoding and the single-pass
//! detect/check/correct erasure decoder.

use serde::Serialize;

use crate::construct::{panchenko, shorten_trailing, Code};
use crate::error::{Error, Result};
use crate::gf2::XorBasis;

/// Longest component code supported by the packed array representation.
pub const MAX_LINE: usize = 128;

/// A component code prepared for fast syndrome computation, encoding and
/// erasure filling on words of at most 128 bits.
#[derive(Clone, Debug)]
pub struct LineCode {
    code: Code,
    n: usize,
    /// Row `c` of `H` as a bit mask over positions.
    checks: Vec<u128>,
    /// Column `j` of `H` as a syndrome word.
    columns: Vec<u64>,
    info: Vec<usize>,
    /// Parity positions, one per row of the reduced `H`.
    pivots: Vec<usize>,
    /// Information positions summed into parity position `pivots[t]`.
    parity_masks: Vec<u128>,
}

impl LineCode {
    pub fn new(code: Code) -> Result<Self> {
        let n = code.n();
        if n > MAX_LINE {
            return Err(Error::InvalidArgument(format!("component length {n} exceeds {MAX_LINE}")));
        }
        let columns = code.h().column_words()?;
        let checks = code.h().row_vectors().iter().map(|row| to_mask(row.iter_ones())).collect();
        let (rref, pivots) = code.h().reduced_row_echelon();
        let info: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        let parity_masks = rref
            .row_vectors()
            .iter()
            .zip(&pivots)
            .map(|(row, &p)| to_mask(row.iter_ones().filter(|&j| j != p)))
            .collect();
        Ok(Self {
            code,
            n,
            checks,
            columns,
            info,
            pivots,
            parity_masks,
        })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information positions.
    pub fn k(&self) -> usize {
        self.info.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    pub fn syndrome(&self, word: u128) -> u64 {
        self.checks
            .iter()
            .enumerate()
            .fold(0, |s, (c, &m)| s | (u64::from((word & m).count_ones() & 1) << c))
    }

    /// Places the `k` low bits of `payload` on the information positions and
    /// fills in the parity positions.
    pub fn encode(&self, payload: u128) -> u128 {
        let mut word = 0u128;
        for (t, &j) in self.info.iter().enumerate() {
            word |= ((payload >> t) & 1) << j;
        }
        for (&p, &m) in self.pivots.iter().zip(&self.parity_masks) {
            word |= u128::from((word & m).count_ones() & 1) << p;
        }
        word
    }

    fn full_mask(&self) -> u128 {
        if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        }
    }

    /// Whether the `H` columns at the positions in `mask` are independent.
    pub fn independent(&self, mask: u128) -> bool {
        let mut basis = XorBasis::new();
        ones(mask).all(|j| basis.insert(self.columns[j]))
    }
}

fn to_mask(positions: impl Iterator<Item = usize>) -> u128 {
    positions.fold(0, |m, j| m | (1u128 << j))
}

fn ones(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let j = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(j)
        }
    })
}

/// Echelon basis over erased positions that remembers which positions each
/// basis vector combines, so a syndrome can be expressed as a sum of erased
/// columns.
struct ErasureSolver {
    /// (reduced syndrome vector, positions combined)
    basis: Vec<(u64, u128)>,
}

impl ErasureSolver {
    /// `None` if the columns at `mask` are dependent.
    fn new(line: &LineCode, mask: u128) -> Option<Self> {
        let mut basis: Vec<(u64, u128)> = Vec::new();
        for j in ones(mask) {
            let (v, combo) = reduce(&basis, line.columns[j], 1u128 << j);
            if v == 0 {
                return None;
            }
            basis.push((v, combo));
        }
        Some(Self { basis })
    }

    /// The erased positions whose columns sum to `syndrome`, if any.
    fn solve(&self, syndrome: u64) -> Option<u128> {
        let (v, combo) = reduce(&self.basis, syndrome, 0);
        (v == 0).then_some(combo)
    }
}

fn reduce(basis: &[(u64, u128)], mut v: u64, mut combo: u128) -> (u64, u128) {
    for &(b, bc) in basis {
        let lead = 63 - b.leading_zeros();
        if (v >> lead) & 1 == 1 {
            v ^= b;
            combo ^= bc;
        }
    }
    (v, combo)
}

/// Product of a row code and a column code.
///
/// Arrays have `col_code.n()` rows of `row_code.n()` bits; every row is a
/// row-code word and every column a column-code word.
#[derive(Clone, Debug)]
pub struct ProductCode {
    row: LineCode,
    col: LineCode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Success,
    DetectedFailure,
    Miscorrection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectedVia {
    Rows,
    Columns,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub class: OutcomeClass,
    pub corrected_via: CorrectedVia,
    /// Number of erased lines (columns or rows) that were filled.
    pub erasure_weight: usize,
}

impl DecodeOutcome {
    pub fn is_failure(&self) -> bool {
        self.class != OutcomeClass::Success
    }
}

impl ProductCode {
    pub fn new(row_code: Code, col_code: Code) -> Result<Self> {
        let row = LineCode::new(row_code)?;
        let col = LineCode::new(col_code)?;
        Ok(Self { row, col })
    }

    /// Product of two copies of the [72,64,4] code obtained from
    /// `panchenko(8)` by removing its last 8 columns.
    pub fn panchenko72() -> Result<Self> {
        let c = shorten_trailing(&panchenko(8)?, 8)?;
        Self::new(c.clone(), c)
    }

    pub fn row_code(&self) -> &LineCode {
        &self.row
    }

    pub fn col_code(&self) -> &LineCode {
        &self.col
    }

    /// Number of rows of an array.
    pub fn rows(&self) -> usize {
        self.col.n
    }

    /// Number of bits per row.
    pub fn cols(&self) -> usize {
        self.row.n
    }

    /// Systematic encoding: payload row `t` (of `row_code.k()` bits) goes to
    /// the `t`-th information row, rows are encoded, then the parity rows
    /// are filled column-wise.
    pub fn encode(&self, payload: &[u128]) -> Result<Vec<u128>> {
        if payload.len() != self.col.k() {
            return Err(Error::InvalidArgument(format!(
                "payload has {} rows, expected {}",
                payload.len(),
                self.col.k()
            )));
        }
        let k_row = self.row.k();
        if payload.iter().any(|&p| k_row < 128 && p >> k_row != 0) {
            return Err(Error::InvalidArgument(format!("payload rows must have {k_row} bits")));
        }
        let mut array = vec![0u128; self.rows()];
        for (&i, &p) in self.col.info.iter().zip(payload) {
            array[i] = self.row.encode(p);
        }
        // each parity row is a sum of information rows, so it is itself a
        // row-code word
        for (&p, &m) in self.col.pivots.iter().zip(&self.col.parity_masks) {
            array[p] = ones(m).fold(0, |acc, i| acc ^ array[i]);
        }
        Ok(array)
    }

    /// Rows with a nonzero row-code syndrome, as a bit mask over row indices.
    pub fn flagged_rows(&self, array: &[u128]) -> u128 {
        array
            .iter()
            .enumerate()
            .fold(0, |m, (i, &w)| if self.row.syndrome(w) != 0 { m | (1u128 << i) } else { m })
    }

    /// Columns with a nonzero column-code syndrome, as a bit mask over
    /// column indices.
    pub fn flagged_columns(&self, array: &[u128]) -> u128 {
        self.col
            .checks
            .iter()
            .map(|&m| ones(m).fold(0u128, |acc, i| acc ^ array[i]))
            .fold(0, |acc, v| acc | v)
    }

    pub fn is_codeword(&self, array: &[u128]) -> bool {
        self.flagged_rows(array) == 0 && self.flagged_columns(array) == 0
    }

    /// Decodes `received` in place and classifies the result against
    /// `transmitted`.
    ///
    /// Flags rows and columns with nonzero syndromes. The flagged columns are
    /// tried first: if there are at most `d_plus` of them and their row-code
    /// `H` columns are independent, those positions are erased in every row
    /// and refilled from the row syndromes. Otherwise the flagged rows are
    /// tried the same way against the column code. A final syndrome check
    /// turns any inconsistency into a detected failure.
    pub fn decode(&self, received: &mut [u128], d_plus: usize, transmitted: &[u128]) -> DecodeOutcome {
        debug_assert_eq!(received.len(), self.rows());
        let cols = self.flagged_columns(received);
        let rows = self.flagged_rows(received);
        let mut via = CorrectedVia::None;
        let mut weight = 0;
        if cols != 0 || rows != 0 {
            if let Some(solver) = self.correctable(&self.row, cols, d_plus) {
                fill(&self.row, &solver, cols, received);
                via = CorrectedVia::Columns;
                weight = cols.count_ones() as usize;
            } else if let Some(solver) = self.correctable(&self.col, rows, d_plus) {
                let mut t = transpose(received, self.cols());
                fill(&self.col, &solver, rows, &mut t);
                received.copy_from_slice(&transpose(&t, self.rows()));
                via = CorrectedVia::Rows;
                weight = rows.count_ones() as usize;
            } else {
                return DecodeOutcome {
                    class: OutcomeClass::DetectedFailure,
                    corrected_via: CorrectedVia::None,
                    erasure_weight: 0,
                };
            }
        }
        let class = if !self.is_codeword(received) {
            OutcomeClass::DetectedFailure
        } else if received == transmitted {
            OutcomeClass::Success
        } else {
            OutcomeClass::Miscorrection
        };
        DecodeOutcome {
            class,
            corrected_via: via,
            erasure_weight: weight,
        }
    }

    fn correctable(&self, line: &LineCode, mask: u128, d_plus: usize) -> Option<ErasureSolver> {
        if mask == 0 || mask.count_ones() as usize > d_plus {
            return None;
        }
        ErasureSolver::new(line, mask)
    }
}

/// Erases the positions in `mask` in every word and refills them so that the
/// word's syndrome vanishes. Words with no such filling keep their received
/// bits.
fn fill(line: &LineCode, solver: &ErasureSolver, mask: u128, words: &mut [u128]) {
    let keep = !mask & line.full_mask();
    for w in words.iter_mut() {
        let kept = *w & keep;
        if let Some(filled) = solver.solve(line.syndrome(kept)) {
            *w = kept | filled;
        }
    }
}

/// Transposes an array of `words.len()` rows by `width` bits.
pub fn transpose(words: &[u128], width: usize) -> Vec<u128> {
    let mut out = vec![0u128; width];
    for (i, &w) in words.iter().enumerate() {
        for j in ones(w) {
            out[j] |= 1u128 << i;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::oracle_spectrum;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pc() -> ProductCode {
        ProductCode::panchenko72().unwrap()
    }

    fn random_payload(pc: &ProductCode, seed: u64) -> Vec<u128> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = pc.row_code().k();
        (0..pc.col_code().k()).map(|_| rng.random::<u128>() & ((1u128 << k) - 1)).collect()
    }

    #[test]
    fn component_code_parameters() {
        let pc = pc();
        let row = pc.row_code();
        assert_eq!((row.n(), row.k()), (72, 64));
        assert_eq!(row.code().d(), Some(4));
        assert_eq!(oracle_spectrum(row.code()).unwrap().min_distance(), Some(4));
    }

    #[test]
    fn line_encoding_gives_codewords() {
        let pc = pc();
        let line = pc.row_code();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let payload = rng.random::<u64>() as u128;
            let w = line.encode(payload);
            assert_eq!(line.syndrome(w), 0);
            // systematic: payload readable on the information positions
            for (t, &j) in line.info_positions().iter().enumerate() {
                assert_eq!((w >> j) & 1, (payload >> t) & 1);
            }
        }
    }

    #[test]
    fn encoding_examples() {
        let pc = pc();
        assert!(pc.encode(&vec![0; 64]).unwrap().iter().all(|&w| w == 0));
        let mut single = vec![0u128; 64];
        single[0] = 1;
        let a = pc.encode(&single).unwrap();
        let weight: u32 = a.iter().map(|w| w.count_ones()).sum();
        assert!(weight >= 16, "weight {weight}");
        assert!(pc.is_codeword(&a));
        for seed in 0..5 {
            assert!(pc.is_codeword(&pc.encode(&random_payload(&pc, seed)).unwrap()));
        }
        assert!(pc.encode(&[0; 3]).is_err());
    }

    #[test]
    fn zero_and_single_errors() {
        let pc = pc();
        let x = pc.encode(&random_payload(&pc, 7)).unwrap();
        let mut y = x.clone();
        let out = pc.decode(&mut y, 3, &x);
        assert_eq!(out.class, OutcomeClass::Success);
        assert_eq!(out.corrected_via, CorrectedVia::None);
        for (i, j) in [(0, 0), (5, 71), (71, 33), (40, 40)] {
            let mut y = x.clone();
            y[i] ^= 1u128 << j;
            assert_eq!(pc.flagged_rows(&y).count_ones(), 1);
            assert_eq!(pc.flagged_columns(&y).count_ones(), 1);
            let out = pc.decode(&mut y, 1, &x);
            assert_eq!(out.class, OutcomeClass::Success);
            assert_eq!(out.corrected_via, CorrectedVia::Columns);
            assert_eq!(out.erasure_weight, 1);
        }
    }

    #[test]
    fn dependent_columns_fall_back_to_rows() {
        let pc = pc();
        let row = pc.row_code();
        // support of a weight-4 row-code word: its H columns sum to zero
        let mut support = None;
        crate::gf2::for_each_combination(72, 4, |idx| {
            if support.is_none() && !row.code().h().columns_independent(idx).unwrap() {
                support = Some(idx.to_vec());
            }
        });
        let support = support.unwrap();
        let x = pc.encode(&random_payload(&pc, 11)).unwrap();
        let mut y = x.clone();
        // a row-code word in one row: the row stays clean, 4 columns flag
        for &j in &support {
            y[10] ^= 1u128 << j;
        }
        assert_eq!(pc.flagged_rows(&y), 0);
        let out = pc.decode(&mut y.clone(), 6, &x);
        assert_eq!(out.class, OutcomeClass::DetectedFailure);
        // add one more error in the same row at a fresh column: the row flags,
        // the 5 flagged columns are dependent, the single row is correctable
        let extra = (0..72).find(|j| !support.contains(j)).unwrap();
        y[10] ^= 1u128 << extra;
        let cols = pc.flagged_columns(&y);
        assert_eq!(cols.count_ones(), 5);
        assert!(!row.independent(cols));
        let out = pc.decode(&mut y, 6, &x);
        assert_eq!(out.class, OutcomeClass::Success);
        assert_eq!(out.corrected_via, CorrectedVia::Rows);
        assert_eq!(out.erasure_weight, 1);
    }

    #[test]
    fn too_many_flags_is_detected() {
        let pc = pc();
        let x = vec![0u128; 72];
        let mut y = x.clone();
        // three columns are always independent when d = 4
        for t in 0..3 {
            y[t * 7] ^= 1u128 << (t * 11);
        }
        assert_eq!(pc.decode(&mut y.clone(), 2, &x).class, OutcomeClass::DetectedFailure);
        assert_eq!(pc.decode(&mut y, 3, &x).class, OutcomeClass::Success);
    }

    #[test]
    fn transpose_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<u128> = (0..72).map(|_| rng.random::<u128>() & ((1u128 << 72) - 1)).collect();
        assert_eq!(transpose(&transpose(&a, 72), 72), a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn outcome_depends_only_on_the_error(seed in any::<u64>(), errors in proptest::collection::vec((0usize..72, 0usize..72), 0..12), d_plus in 1usize..8) {
            let pc = pc();
            let x = pc.encode(&random_payload(&pc, seed)).unwrap();
            let zero = vec![0u128; 72];
            let mut y = x.clone();
            let mut e = zero.clone();
            for &(i, j) in &errors {
                y[i] ^= 1u128 << j;
                e[i] ^= 1u128 << j;
            }
            let a = pc.decode(&mut y.clone(), d_plus, &x);
            prop_assert_eq!(a, pc.decode(&mut e.clone(), d_plus, &zero));
            // deterministic
            prop_assert_eq!(a, pc.decode(&mut y, d_plus, &x));
        }

        #[test]
        fn row_permutation_keeps_the_class(errors in proptest::collection::vec((0usize..72, 0usize..72), 0..10), shift in 1usize..72) {
            // cyclically relabel rows of both the array and the column code
            let pc = pc();
            let order: Vec<usize> = (0..72).map(|i| (i + shift) % 72).collect();
            let col_h = pc.col_code().code().h().select_columns(&order).unwrap();
            let permuted = ProductCode::new(
                pc.row_code().code().clone(),
                Code::from_matrix(col_h, "perm").unwrap(),
            ).unwrap();
            let zero = vec![0u128; 72];
            let mut e = zero.clone();
            for &(i, j) in &errors {
                e[i] ^= 1u128 << j;
            }
            let pe: Vec<u128> = order.iter().map(|&i| e[i]).collect();
            let a = pc.decode(&mut e.clone(), 4, &zero);
            let b = permuted.decode(&mut pe.clone(), 4, &zero);
            prop_assert_eq!(a.class, b.class);
        }
    }
}
