//! Lexicographic enumeration of k-subsets of `0..n`, with rank-based
//! chunking so that disjoint pieces of the combination space can be walked
//! independently (and in parallel) while visiting exactly the same subsets as
//! a sequential walk.

use std::ops::Range;

use rayon::prelude::*;

use super::binomial::binomial_u128;

/// Advances `combo` (strictly increasing, values `< n`) to its lexicographic
/// successor. Returns `false` when `combo` was the last combination.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of `k`-subsets of an `n`-set, `None` if it does not fit in `u128`.
pub fn combination_count(n: usize, k: usize) -> Option<u128> {
    binomial_u128(n as u64, k as u64)
}

/// The combination with lexicographic rank `rank` (0-based).
///
/// # Panics
/// Panics if `rank >= C(n, k)` or the count overflows `u128`.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let total = combination_count(n, k).expect("combination count overflows u128");
    assert!(rank < total, "rank {rank} out of range ({total} combinations)");
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for i in 0..k {
        let mut c = next;
        loop {
            let with_c = combination_count(n - c - 1, k - i - 1).unwrap();
            if rank < with_c {
                break;
            }
            rank -= with_c;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Calls `visitor` once for every `k`-subset of `0..n`, in lexicographic
/// order.
pub fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut visitor: F) {
    if k > n {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        visitor(&combo);
        if !next_combination(&mut combo, n) {
            break;
        }
    }
}

/// Visits the combinations whose lexicographic ranks lie in `ranks`.
pub fn for_each_in_rank_range<F: FnMut(&[usize])>(
    n: usize,
    k: usize,
    ranks: Range<u128>,
    mut visitor: F,
) {
    if ranks.is_empty() {
        return;
    }
    let mut combo = unrank_combination(n, k, ranks.start);
    let mut remaining = ranks.end - ranks.start;
    loop {
        visitor(&combo);
        remaining -= 1;
        if remaining == 0 || !next_combination(&mut combo, n) {
            break;
        }
    }
}

/// Splits `0..total` into at most `chunks` contiguous, nearly equal ranges.
pub fn chunk_ranges(total: u128, chunks: usize) -> Vec<Range<u128>> {
    let chunks = (chunks.max(1) as u128).min(total.max(1));
    let base = total / chunks;
    let extra = total % chunks;
    let mut start = 0;
    (0..chunks)
        .map(|i| {
            let len = base + u128::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .filter(|r| !r.is_empty())
        .collect()
}

/// Chunk-parallel fold over all `k`-subsets of `0..n`.
///
/// Each chunk starts from `init()`, folds its combinations with `fold`, and
/// the per-chunk results are returned in chunk order, so the outcome does not
/// depend on the number of worker threads.
pub fn par_fold_chunks<T, I, F>(n: usize, k: usize, chunks: usize, init: I, fold: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &[usize]) + Sync,
{
    let Some(total) = combination_count(n, k) else {
        panic!("combination count C({n},{k}) overflows u128");
    };
    if k > n {
        return Vec::new();
    }
    chunk_ranges(total, chunks)
        .into_par_iter()
        .map(|range| {
            let mut acc = init();
            for_each_in_rank_range(n, k, range, |c| fold(&mut acc, c));
            acc
        })
        .collect()
}
