//! Counting correctable erasure patterns: sets of `rho` columns of `H` that
//! are linearly independent.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construct::Code;
use crate::error::{Error, Result};
use crate::gf2::{binomial, combination_count, XorBasis};

/// Default cap on `C(n, rho)` for exact enumeration.
pub const DEFAULT_EXACT_BUDGET: u64 = 10_000_000_000;

/// Samples drawn per independent RNG stream by [`s_rho_sampled`].
pub const SAMPLE_CHUNK: u64 = 1 << 16;

/// Exact number of `rho`-subsets of columns of `H` with full rank `rho`.
///
/// Walks the subsets in lexicographic order keeping an echelon basis of the
/// current prefix; a prefix that is already dependent prunes its whole
/// subtree. The work is split over the first two indices, and the partial
/// counts are integers, so the result does not depend on the thread count.
pub fn s_rho_exact(c: &Code, rho: usize, budget: u64) -> Result<u64> {
    let n = c.n();
    if rho > n {
        return Err(Error::InvalidArgument(format!("rho = {rho} exceeds n = {n}")));
    }
    if rho > c.h().rank() {
        return Ok(0);
    }
    let required = combination_count(n, rho).unwrap_or(u128::MAX);
    if required > u128::from(budget) {
        return Err(Error::budget(
            format!("exact S_rho enumeration for n={n}, rho={rho}"),
            required,
            budget,
        ));
    }
    let cols = c.h().column_words()?;
    log::debug!("enumerating {required} subsets (n={n}, rho={rho})");
    Ok(count_independent(&cols, rho))
}

pub(crate) fn count_independent(cols: &[u64], rho: usize) -> u64 {
    let n = cols.len();
    match rho {
        0 => 1,
        1 => cols.iter().filter(|&&c| c != 0).count() as u64,
        _ => {
            let prefixes: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(_, b)| b + rho - 1 <= n)
                .collect();
            prefixes
                .into_par_iter()
                .map(|(a, b)| {
                    let mut basis = XorBasis::new();
                    if !basis.insert(cols[a]) || !basis.insert(cols[b]) {
                        return 0;
                    }
                    extend(cols, b + 1, rho - 2, &mut basis)
                })
                .sum()
        }
    }
}

fn extend(cols: &[u64], start: usize, remaining: usize, basis: &mut XorBasis) -> u64 {
    if remaining == 0 {
        return 1;
    }
    let n = cols.len();
    if remaining == 1 {
        return cols[start..].iter().filter(|&&v| basis.reduce(v) != 0).count() as u64;
    }
    let mut total = 0;
    for j in start..=n - remaining {
        let v = basis.reduce(cols[j]);
        if v != 0 {
            basis.push_reduced(v);
            total += extend(cols, j + 1, remaining - 1, basis);
            basis.pop();
        }
    }
    total
}

/// Monte Carlo estimate of `S_rho` from uniform random `rho`-subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCount {
    pub hits: u64,
    pub samples: u64,
    pub total: BigUint,
    /// `hits / samples`, the estimate of `delta_rho`.
    pub fraction: f64,
    /// Standard error of `fraction`.
    pub sigma: f64,
}

impl SampledCount {
    /// Estimate of `S_rho` itself.
    pub fn estimate(&self) -> f64 {
        self.fraction * self.total.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Half-width of the 95% normal-approximation interval on `S_rho`.
    pub fn ci_halfwidth(&self) -> f64 {
        1.96 * self.sigma * self.total.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Samples `samples` uniform `rho`-subsets and counts the independent ones.
///
/// Sample block `i` (of [`SAMPLE_CHUNK`] samples) draws from ChaCha8 stream
/// `i` of `seed`, so the result is reproducible for any thread count.
pub fn s_rho_sampled(c: &Code, rho: usize, samples: u64, seed: u64) -> Result<SampledCount> {
    let n = c.n();
    if rho > n {
        return Err(Error::InvalidArgument(format!("rho = {rho} exceeds n = {n}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let cols = c.h().column_words()?;
    let blocks = samples.div_ceil(SAMPLE_CHUNK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let count = SAMPLE_CHUNK.min(samples - block * SAMPLE_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let mut picked = Vec::with_capacity(rho);
            let mut hits = 0;
            for _ in 0..count {
                sample_subset(&mut rng, n, rho, &mut picked);
                let mut basis = XorBasis::new();
                if picked.iter().all(|&j| basis.insert(cols[j])) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let fraction = hits as f64 / samples as f64;
    Ok(SampledCount {
        hits,
        samples,
        total: binomial(n as u64, rho as u64),
        fraction,
        sigma: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    })
}

/// Floyd's algorithm: a uniform `k`-subset of `0..n` (unordered).
pub(crate) fn sample_subset<R: Rng>(rng: &mut R, n: usize, k: usize, out: &mut Vec<usize>) {
    out.clear();
    for j in n - k..n {
        let t = rng.random_range(0..=j);
        if out.contains(&t) {
            out.push(j);
        } else {
            out.push(t);
        }
    }
}
