//! Recursive refinement of the inclusion-exclusion bound using the spectra of
//! the code's trailing-shortened subcodes.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::construct::Code;
use crate::error::{Error, Result};
use crate::gf2::binomial;
use crate::spectrum::{oracle_spectrum_of, SpectrumKind, WeightSpectrum};

/// Supplies the weight spectrum of the code restricted to its first `m`
/// columns (the code shortened on its trailing `n - m` positions).
pub trait ShortenedSpectra: Sync {
    fn length(&self) -> usize;
    fn spectrum(&self, m: usize) -> Result<WeightSpectrum>;
}

/// [`ShortenedSpectra`] computed by the enumeration oracle and memoized.
pub struct TrailingShortening {
    code: Code,
    cache: Mutex<HashMap<usize, WeightSpectrum>>,
}

impl TrailingShortening {
    pub fn new(code: Code) -> Self {
        Self {
            code,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Seeds the cache with an already known full-length spectrum.
    pub fn with_full_spectrum(code: Code, s: WeightSpectrum) -> Result<Self> {
        if s.n() != code.n() || s.kind() != SpectrumKind::Primal {
            return Err(Error::InvalidArgument("spectrum does not belong to the code".into()));
        }
        let n = code.n();
        let this = Self::new(code);
        this.cache.lock().unwrap().insert(n, s);
        Ok(this)
    }
}

impl ShortenedSpectra for TrailingShortening {
    fn length(&self) -> usize {
        self.code.n()
    }

    fn spectrum(&self, m: usize) -> Result<WeightSpectrum> {
        if m > self.code.n() {
            return Err(Error::InvalidArgument(format!(
                "shortened length {m} exceeds n = {}",
                self.code.n()
            )));
        }
        if let Some(s) = self.cache.lock().unwrap().get(&m) {
            return Ok(s.clone());
        }
        let cols: Vec<usize> = (0..m).collect();
        let s = oracle_spectrum_of(&self.code.h().select_columns(&cols)?)?;
        self.cache.lock().unwrap().insert(m, s.clone());
        Ok(s)
    }
}

/// The recursive estimate of `S_rho`.
///
/// Each dependent pattern is charged to a codeword support of weight `w`
/// inside it, and the remaining `rho - w` positions are counted among the
/// `m - w` positions to the left by recursing on the shorter code. `depth`
/// limits the number of recursion levels; at depth 0 (or once `rho < d`) the
/// inner count falls back to the plain binomial. `depth = 1` reproduces the
/// inclusion-exclusion bound, `None` recurses all the way down.
pub fn psi_tilde(
    provider: &dyn ShortenedSpectra,
    d: usize,
    rho: usize,
    depth: Option<u32>,
) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::InvalidArgument("minimum distance must be positive".into()));
    }
    let n = provider.length();
    let mut memo = HashMap::new();
    psi_tilde_at(provider, d, n, rho, depth, &mut memo)
}

fn psi_tilde_at(
    provider: &dyn ShortenedSpectra,
    d: usize,
    m: usize,
    rho: usize,
    depth: Option<u32>,
    memo: &mut HashMap<(usize, usize, Option<u32>), BigInt>,
) -> Result<BigInt> {
    if rho > m {
        return Ok(BigInt::from(0));
    }
    let all = BigInt::from(binomial(m as u64, rho as u64));
    if rho < d || depth == Some(0) {
        return Ok(all);
    }
    if let Some(v) = memo.get(&(m, rho, depth)) {
        return Ok(v.clone());
    }
    let s = provider.spectrum(m)?;
    let inner = depth.map(|t| t - 1);
    let mut acc = all;
    for w in d..=rho {
        let a = s.get(w);
        if *a == BigUint::ZERO {
            continue;
        }
        let rest = psi_tilde_at(provider, d, m - w, rho - w, inner, memo)?;
        acc -= BigInt::from(a.clone()) * rest;
    }
    memo.insert((m, rho, depth), acc.clone());
    Ok(acc)
}

/// `psi_tilde / C(n, rho)`.
pub fn delta_tilde(
    provider: &dyn ShortenedSpectra,
    d: usize,
    rho: usize,
    depth: Option<u32>,
) -> Result<BigRational> {
    let n = provider.length();
    if rho > n {
        return Err(Error::InvalidArgument(format!("rho = {rho} exceeds n = {n}")));
    }
    let num = psi_tilde(provider, d, rho, depth)?;
    Ok(BigRational::new(num, BigInt::from(binomial(n as u64, rho as u64))))
}

/// The two-level estimate written out as a double sum:
///
/// `1 - sum_w A_w(n) C(n-w, rho-w)/C(n, rho)
///    + sum_w sum_v A_w(n) A_v(n-w) C(n-w-v, rho-w-v)/C(n, rho)`.
///
/// Kept separate from [`psi_tilde`] so the two can be checked against each
/// other.
pub fn delta_tilde_two_level(
    provider: &dyn ShortenedSpectra,
    d: usize,
    rho: usize,
) -> Result<BigRational> {
    let n = provider.length();
    if rho > n {
        return Err(Error::InvalidArgument(format!("rho = {rho} exceeds n = {n}")));
    }
    let big = |x: &BigUint| BigInt::from(x.clone());
    let c = |a: usize, b: usize| BigInt::from(binomial(a as u64, b as u64));
    let top = provider.spectrum(n)?;
    let mut num = c(n, rho);
    for w in d..=rho {
        let aw = big(top.get(w));
        if aw == BigInt::ZERO {
            continue;
        }
        num -= &aw * c(n - w, rho - w);
        if rho - w < d {
            continue;
        }
        let inner = provider.spectrum(n - w)?;
        for v in d..=rho - w {
            if v > n - w {
                break;
            }
            num += &aw * big(inner.get(v)) * c(n - w - v, rho - w - v);
        }
    }
    Ok(BigRational::new(num, c(n, rho)))
}
