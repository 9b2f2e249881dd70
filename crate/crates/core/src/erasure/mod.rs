//! Correction of erasure patterns of weight `rho >= d`.
//!
//! A pattern of `rho` erased positions is correctable iff the corresponding
//! columns of `H` are linearly independent. `S_rho` counts such patterns and
//! `delta_rho = S_rho / C(n, rho)` is the probability that a uniformly random
//! pattern of that weight is correctable.

mod approx;
mod count;
mod recursive;
mod table;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::construct::Code;
use crate::error::{Error, Result};
use crate::gf2::binomial;
use crate::spectrum::{SpectrumKind, WeightSpectrum};

pub use approx::{binary_entropy, binomial_spectrum_estimate, delta_entropy_bound, ApproxParams, EntropyBounds};
pub(crate) use count::sample_subset;
pub use count::{s_rho_exact, s_rho_sampled, SampledCount, DEFAULT_EXACT_BUDGET, SAMPLE_CHUNK};
pub use recursive::{delta_tilde, delta_tilde_two_level, psi_tilde, ShortenedSpectra, TrailingShortening};
pub use table::{table1, table1_codes, Table1Cell, Table1Options, TABLE1_PRINTED};

/// `C(n, rho) - sum_{w=d}^{rho} A_w C(n-w, rho-w)`.
///
/// A lower bound on `S_rho`, exact while `rho <= d + (d-1)/2`. For `rho < d`
/// the sum is empty. The value may go negative for large `rho`.
pub fn psi(s: &WeightSpectrum, d: usize, rho: usize) -> Result<BigInt> {
    check_spectrum(s, d)?;
    let n = s.n();
    if rho > n {
        return Err(Error::InvalidArgument(format!("rho = {rho} exceeds n = {n}")));
    }
    let mut acc = BigInt::from(binomial(n as u64, rho as u64));
    for w in d..=rho {
        let a = s.get(w);
        if !a.is_zero() {
            acc -= BigInt::from(a * binomial((n - w) as u64, (rho - w) as u64));
        }
    }
    Ok(acc)
}

fn check_spectrum(s: &WeightSpectrum, d: usize) -> Result<()> {
    if s.kind() != SpectrumKind::Primal {
        return Err(Error::InvalidArgument("expected the code's own (primal) spectrum".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("minimum distance must be positive".into()));
    }
    if let Some(w) = (1..d.min(s.n() + 1)).find(|&w| !s.get(w).is_zero()) {
        return Err(Error::InvalidArgument(format!(
            "spectrum has codewords of weight {w} < d = {d}"
        )));
    }
    Ok(())
}

/// `psi / C(n, rho)` as an exact fraction.
pub fn delta_lower(s: &WeightSpectrum, d: usize, rho: usize) -> Result<BigRational> {
    let num = psi(s, d, rho)?;
    Ok(BigRational::new(num, BigInt::from(binomial(s.n() as u64, rho as u64))))
}

/// Whether `psi` equals `S_rho` exactly: `rho <= d + (d-1)/2`.
pub fn is_exact_regime(d: usize, rho: usize) -> bool {
    // rho <= d + (d-1)/2 over the rationals
    2 * rho <= 3 * d - 1
}

/// How the headline `delta` of a report was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    PsiBound,
    Recursive,
    Sampled,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::PsiBound => "psi-bound",
            Method::Recursive => "recursive",
            Method::Sampled => "sampled",
        }
    }
}

/// Source of the `S_rho` value in a report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CountMode {
    /// Enumerate; fail if `C(n, rho)` exceeds the budget.
    Exact { budget: u64 },
    /// Sample uniform patterns.
    Sampled { samples: u64, seed: u64 },
    /// Enumerate within the budget, otherwise sample.
    Auto { budget: u64, samples: u64, seed: u64 },
    /// No count; the headline value is the inclusion-exclusion bound.
    PsiOnly,
    /// No count; the headline value is the recursive estimate.
    Recursive,
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub count: CountMode,
    /// Recursion depth for `psi_tilde`; `None` recurses fully.
    pub depth: Option<u32>,
    pub z: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            count: CountMode::Exact {
                budget: DEFAULT_EXACT_BUDGET,
            },
            depth: None,
            z: None,
        }
    }
}

/// Everything computed for one pattern weight.
#[derive(Clone, Debug)]
pub struct ErasureReport {
    pub rho: usize,
    pub total: BigUint,
    pub psi: BigInt,
    pub psi_tilde: BigInt,
    pub s_rho_exact: Option<u64>,
    pub sampled: Option<SampledCount>,
    /// `max(psi, 0) / C(n, rho)`.
    pub delta_lower: BigRational,
    pub delta_exact: Option<BigRational>,
    /// `max(psi_tilde, 0) / C(n, rho)`.
    pub delta_tilde: BigRational,
    pub delta_tilde_2: BigRational,
    pub entropy: Option<EntropyBounds>,
    pub exact_regime: bool,
    pub method: Method,
}

impl ErasureReport {
    /// The headline estimate of `delta_rho` according to [`Self::method`].
    pub fn delta(&self) -> f64 {
        match self.method {
            Method::Exact => to_f64(self.delta_exact.as_ref().unwrap()),
            Method::Sampled => self.sampled.as_ref().unwrap().fraction,
            Method::PsiBound => to_f64(&self.delta_lower),
            Method::Recursive => to_f64(&self.delta_tilde),
        }
    }

    /// Exact `S_rho` if enumerated, else the sampled estimate.
    pub fn s_rho_value(&self) -> Option<f64> {
        self.s_rho_exact
            .map(|s| s as f64)
            .or_else(|| self.sampled.as_ref().map(SampledCount::estimate))
    }
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn clamped_ratio(num: &BigInt, total: &BigUint) -> BigRational {
    let num = if num.sign() == num_bigint::Sign::Minus { BigInt::zero() } else { num.clone() };
    BigRational::new(num, BigInt::from(total.clone()))
}

/// Builds the report for pattern weight `rho` of `code` with spectrum `s`.
pub fn erasure_report(
    code: &Code,
    provider: &dyn ShortenedSpectra,
    s: &WeightSpectrum,
    rho: usize,
    opts: &ReportOptions,
) -> Result<ErasureReport> {
    let d = code
        .d()
        .ok_or_else(|| Error::InvalidArgument("code has no nonzero codeword".into()))?;
    let n = code.n();
    if s.n() != n || provider.length() != n {
        return Err(Error::InvalidArgument("spectrum or provider length differs from the code".into()));
    }
    let total = binomial(n as u64, rho as u64);
    let psi_value = psi(s, d, rho)?;
    let tilde = psi_tilde(provider, d, rho, opts.depth)?;
    let tilde2 = delta_tilde_two_level(provider, d, rho)?;

    let (s_exact, sampled, method) = match opts.count {
        CountMode::Exact { budget } => (Some(s_rho_exact(code, rho, budget)?), None, Method::Exact),
        CountMode::Sampled { samples, seed } => {
            (None, Some(s_rho_sampled(code, rho, samples, seed)?), Method::Sampled)
        }
        CountMode::Auto { budget, samples, seed } => match s_rho_exact(code, rho, budget) {
            Ok(v) => (Some(v), None, Method::Exact),
            Err(Error::BudgetExceeded { .. }) => {
                (None, Some(s_rho_sampled(code, rho, samples, seed)?), Method::Sampled)
            }
            Err(e) => return Err(e),
        },
        CountMode::PsiOnly => (None, None, Method::PsiBound),
        CountMode::Recursive => (None, None, Method::Recursive),
    };

    let entropy = match opts.z {
        Some(z) if rho >= d && rho > 0 => Some(delta_entropy_bound(d, rho, ApproxParams::new(code.r(), z)?)?),
        Some(z) => {
            ApproxParams::new(code.r(), z)?;
            None
        }
        None => None,
    };

    Ok(ErasureReport {
        rho,
        delta_lower: clamped_ratio(&psi_value, &total),
        delta_exact: s_exact.map(|v| BigRational::new(BigInt::from(v), BigInt::from(total.clone()))),
        delta_tilde: clamped_ratio(&tilde, &total),
        delta_tilde_2: tilde2,
        total,
        psi: psi_value,
        psi_tilde: tilde,
        s_rho_exact: s_exact,
        sampled,
        entropy,
        exact_regime: is_exact_regime(d, rho),
        method,
    })
}

/// Formats a fraction in decimal with `digits` places, rounding half away
/// from zero.
pub fn format_decimal(q: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let negative = q.numer().sign() == num_bigint::Sign::Minus;
    let num = q.numer().magnitude() * scale.magnitude() * 2u32 + q.denom().magnitude();
    let scaled = num / (q.denom().magnitude() * 2u32);
    let mut s = scaled.to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
        }
        s.insert(s.len() - digits, '.');
    }
    if negative && !scaled.is_zero() {
        s.insert(0, '-');
    }
    s
}
