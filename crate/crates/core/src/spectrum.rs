//! Exact weight spectra.
//!
//! Two independent routes are provided:
//!
//! * the doubling recursions, which derive the spectrum of a doubled code
//!   (and of its dual) from the spectrum of the code it was doubled from;
//! * an oracle that enumerates the whole row space of `H` (the dual code,
//!   `2^rank` words) and maps its spectrum to the primal one with the
//!   MacWilliams transform.
//!
//! All counts are arbitrary precision; nothing here touches floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::Code;
use crate::error::{Error, Result};
use crate::gf2::{binomial, binomial_row, BitMatrix};

/// Largest `rank(H)` the oracle will enumerate (`2^rank` dual words).
pub const ORACLE_MAX_RANK: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Primal,
    Dual,
}

impl SpectrumKind {
    pub fn flipped(self) -> Self {
        match self {
            SpectrumKind::Primal => SpectrumKind::Dual,
            SpectrumKind::Dual => SpectrumKind::Primal,
        }
    }
}

/// Counts `A_0..=A_n` of codewords by weight.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightSpectrum {
    kind: SpectrumKind,
    counts: Vec<BigUint>,
}

impl WeightSpectrum {
    pub fn zeros(n: usize, kind: SpectrumKind) -> Self {
        Self {
            kind,
            counts: vec![BigUint::ZERO; n + 1],
        }
    }

    /// Builds a spectrum from `A_0..=A_n`.
    pub fn from_counts(counts: Vec<BigUint>, kind: SpectrumKind) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("spectrum needs at least A_0".into()));
        }
        Ok(Self { kind, counts })
    }

    /// Sparse constructor, e.g. `from_pairs(8, &[(0, 1), (4, 14), (8, 1)])`.
    pub fn from_pairs(n: usize, pairs: &[(usize, u64)], kind: SpectrumKind) -> Self {
        let mut s = Self::zeros(n, kind);
        for &(w, c) in pairs {
            s.counts[w] = BigUint::from(c);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// `A_w`, zero outside `0..=n`.
    pub fn get(&self, w: usize) -> &BigUint {
        static ZERO: BigUint = BigUint::ZERO;
        self.counts.get(w).unwrap_or(&ZERO)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `log2` of the total, when the total is a power of two.
    pub fn dimension(&self) -> Option<usize> {
        let t = self.total();
        let bits = t.bits();
        (bits > 0 && t == BigUint::one() << (bits - 1)).then(|| bits as usize - 1)
    }

    /// Smallest nonzero weight with a nonzero count.
    pub fn min_distance(&self) -> Option<usize> {
        (1..self.counts.len()).find(|&w| !self.counts[w].is_zero())
    }

    /// Nonzero `(w, A_w)` entries.
    pub fn support(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

impl fmt::Debug for WeightSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightSpectrum({:?}, n={}, {{", self.kind, self.n())?;
        for (i, (w, c)) in self.support().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}: {c}")?;
        }
        f.write_str("})")
    }
}

/// Spectrum of the code obtained by doubling a code with spectrum `s`.
///
/// A codeword of the doubled code is `(x, y)` with `x + y = c` a codeword of
/// the base code, `y` of even weight. Writing `J` for the positions outside
/// `supp(c)` where both halves are 1, the codeword has weight
/// `wt(c) + 2|J|`. For `c != 0` of weight `w` there are `2^(w-1)` ways to
/// split `supp(c)` with the right parity and `C(half_n - w, j)` choices of
/// `J`; `c = 0` contributes `C(half_n, v)` at weight `2v` for even `v`.
///
/// The closed form only sums codeword weights `>= 4`, so input spectra with
/// codewords of weight 1, 2 or 3 are refused.
pub fn doubled_spectrum(s: &WeightSpectrum, half_n: usize) -> Result<WeightSpectrum> {
    if s.kind != SpectrumKind::Primal {
        return Err(Error::InvalidArgument("doubled_spectrum needs a primal spectrum".into()));
    }
    if s.n() != half_n {
        return Err(Error::InvalidArgument(format!(
            "spectrum has length {}, half-length is {half_n}",
            s.n()
        )));
    }
    if s.get(0) != &BigUint::one() {
        return Err(Error::Inconsistent("spectrum must have A_0 = 1".into()));
    }
    if let Some(w) = (1..=3).find(|&w| !s.get(w).is_zero()) {
        return Err(Error::LowWeightCodewords {
            weight: w,
            count: s.get(w).to_string(),
        });
    }
    let n = 2 * half_n;
    let mut out = WeightSpectrum::zeros(n, SpectrumKind::Primal);

    // c = 0: the same v columns on both sides, v even
    for v in (0..=half_n).step_by(2) {
        out.counts[2 * v] += binomial(half_n as u64, v as u64);
    }
    for (w, a_w) in s.support().filter(|&(w, _)| w >= 4) {
        let scaled: BigUint = a_w << (w - 1);
        for (j, c) in binomial_row((half_n - w) as u64).into_iter().enumerate() {
            out.counts[w + 2 * j] += &scaled * c;
        }
    }
    Ok(out)
}

/// Dual spectrum of a doubled code from the dual spectrum `s` of the base
/// code: each base dual word `u` yields `(u, u)` of doubled weight, and the
/// `2^(r-1)` words that include the new top row all have weight `half_n`.
///
/// `r` is the redundancy of the doubled code. The base `H` must have full
/// row rank (`sum(s) = 2^(r-1)`) and `half_n` must be even.
pub fn doubled_dual_spectrum(s: &WeightSpectrum, r: usize, half_n: usize) -> Result<WeightSpectrum> {
    if s.kind != SpectrumKind::Dual {
        return Err(Error::InvalidArgument("doubled_dual_spectrum needs a dual spectrum".into()));
    }
    if s.n() != half_n {
        return Err(Error::InvalidArgument(format!(
            "spectrum has length {}, half-length is {half_n}",
            s.n()
        )));
    }
    if half_n % 2 == 1 {
        return Err(Error::OddHalfLength(half_n));
    }
    if r == 0 || s.total() != BigUint::one() << (r - 1) {
        return Err(Error::InvalidArgument(format!(
            "base dual code has {} words, expected 2^{} (full-rank base)",
            s.total(),
            r.saturating_sub(1)
        )));
    }
    let mut out = WeightSpectrum::zeros(2 * half_n, SpectrumKind::Dual);
    for (v, c) in s.support() {
        out.counts[2 * v] += c;
    }
    out.counts[half_n] += BigUint::one() << (r - 1);
    Ok(out)
}

/// Spectrum of the row space of `h` by exhaustive Gray-code enumeration.
pub fn dual_spectrum_by_enumeration(h: &BitMatrix) -> Result<WeightSpectrum> {
    let (basis, _) = h.reduced_row_echelon();
    let rank = basis.rows();
    if rank > ORACLE_MAX_RANK {
        return Err(Error::budget(
            "dual code enumeration",
            format!("2^{rank} words"),
            format!("2^{ORACLE_MAX_RANK}"),
        ));
    }
    let n = h.cols();
    let basis: Vec<Vec<u64>> = basis.row_vectors().iter().map(|r| r.words().to_vec()).collect();
    let words_per_row = n.div_ceil(64);

    let chunk_bits = rank.min(6);
    let per_chunk: u64 = 1 << (rank - chunk_bits);
    let partials: Vec<Vec<u64>> = (0..1u64 << chunk_bits)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * per_chunk;
            let mut word = vec![0u64; words_per_row];
            let gray = start ^ (start >> 1);
            for (bit, row) in basis.iter().enumerate() {
                if (gray >> bit) & 1 == 1 {
                    xor_into(&mut word, row);
                }
            }
            let mut counts = vec![0u64; n + 1];
            counts[weight(&word)] += 1;
            for i in start + 1..start + per_chunk {
                xor_into(&mut word, &basis[i.trailing_zeros() as usize]);
                counts[weight(&word)] += 1;
            }
            counts
        })
        .collect();

    let mut total = vec![0u64; n + 1];
    for p in partials {
        for (t, c) in total.iter_mut().zip(p) {
            *t += c;
        }
    }
    WeightSpectrum::from_counts(total.into_iter().map(BigUint::from).collect(), SpectrumKind::Dual)
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn weight(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// MacWilliams transform over GF(2).
///
/// `s` is the spectrum of a code of dimension `k` and length `n`; the result
/// is the spectrum of its dual, `B_w = 2^-k * sum_i A_i K_w(i)` with binary
/// Krawtchouk polynomials `K_w`. A non-integral or negative coefficient
/// means the input was not the spectrum of a linear code of dimension `k`.
pub fn macwilliams(s: &WeightSpectrum, k: usize) -> Result<WeightSpectrum> {
    let n = s.n();
    if s.total() != BigUint::one() << k {
        return Err(Error::Inconsistent(format!(
            "spectrum totals {} but dimension {k} needs 2^{k}",
            s.total()
        )));
    }
    let mut acc = vec![BigInt::zero(); n + 1];
    for (i, a_i) in s.support() {
        let a_i = BigInt::from(a_i.clone());
        for (w, kw) in krawtchouk_column(n, i).into_iter().enumerate() {
            acc[w] += &a_i * kw;
        }
    }
    let mut counts = Vec::with_capacity(n + 1);
    for (w, v) in acc.into_iter().enumerate() {
        let q: BigInt = &v >> k;
        if v.sign() == Sign::Minus || (&q << k) != v {
            return Err(Error::Inconsistent(format!(
                "MacWilliams coefficient at weight {w} is {v}/2^{k}, not a nonnegative integer"
            )));
        }
        counts.push(q.to_biguint().expect("checked nonnegative"));
    }
    WeightSpectrum::from_counts(counts, s.kind.flipped())
}

/// `K_0(x), ..., K_n(x)` for length `n`, via
/// `(w+1) K_{w+1} = (n - 2x) K_w - (n - w + 1) K_{w-1}`.
fn krawtchouk_column(n: usize, x: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    if n == 0 {
        return out;
    }
    let slope = BigInt::from(n as i64 - 2 * x as i64);
    out.push(slope.clone());
    for w in 1..n {
        let next = (&slope * &out[w] - BigInt::from(n - w + 1) * &out[w - 1]) / BigInt::from(w + 1);
        out.push(next);
    }
    out
}

/// Primal spectrum of the code with parity-check matrix `h`, via the dual
/// enumeration and MacWilliams.
pub fn oracle_spectrum_of(h: &BitMatrix) -> Result<WeightSpectrum> {
    let dual = dual_spectrum_by_enumeration(h)?;
    let rank = dual.dimension().expect("row space has 2^rank words");
    macwilliams(&dual, rank)
}

pub fn oracle_spectrum(c: &Code) -> Result<WeightSpectrum> {
    oracle_spectrum_of(c.h())
}

pub fn oracle_dual_spectrum(c: &Code) -> Result<WeightSpectrum> {
    dual_spectrum_by_enumeration(c.h())
}

/// Minimum distance of the code with parity-check matrix `h`; `None` when
/// the code is `{0}`.
pub fn minimum_distance(h: &BitMatrix) -> Result<Option<usize>> {
    Ok(oracle_spectrum_of(h)?.min_distance())
}

/// Primal spectrum by the doubling recursion: the undoubled base gets an
/// oracle spectrum, then one [`doubled_spectrum`] step per doubling.
pub fn spectrum_by_doubling(c: &Code) -> Result<WeightSpectrum> {
    let base = c.undoubled_base()?;
    let mut s = oracle_spectrum_of(&base)?;
    let mut half = base.cols();
    for _ in 0..c.spec().lineage.doublings {
        s = doubled_spectrum(&s, half)?;
        half *= 2;
    }
    Ok(s)
}

/// Dual spectrum by the dual doubling step: the undoubled base is
/// enumerated, then [`doubled_dual_spectrum`] is applied once per doubling.
pub fn dual_spectrum_by_doubling(c: &Code) -> Result<WeightSpectrum> {
    let base = c.undoubled_base()?;
    let mut s = dual_spectrum_by_enumeration(&base)?;
    let mut half = base.cols();
    let mut r = base.rows();
    for _ in 0..c.spec().lineage.doublings {
        r += 1;
        s = doubled_dual_spectrum(&s, r, half)?;
        half *= 2;
    }
    Ok(s)
}
