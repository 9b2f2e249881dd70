//! Monte Carlo estimation of the decoder failure probability over a channel
//! that flips every bit of the array independently.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::decoder::{OutcomeClass, ProductCode};
use crate::erasure::sample_subset;
use crate::error::{Error, Result};

/// Trials handed to one rayon task.
const TRIAL_BLOCK: u64 = 1024;

/// Stratified streams live above this offset so they never reuse a plain
/// trial's stream.
const STRATUM_STREAM_SHIFT: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    Plain,
    /// Condition on the number of flipped bits `K ~ Binomial(N, p)`.
    Stratified {
        /// Largest stratum; `None` picks the smallest `k` whose upper tail
        /// is below `eps_tail`.
        kmax: Option<usize>,
        per_stratum: u64,
        eps_tail: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub p: f64,
    pub d_plus: usize,
    /// Trials for the plain strategy (ignored by the stratified one).
    pub trials: u64,
    pub master_seed: u64,
    pub strategy: Strategy,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p = {} is not a probability", self.p)));
        }
        if self.d_plus == 0 {
            return Err(Error::InvalidArgument("d_plus must be positive".into()));
        }
        match self.strategy {
            Strategy::Plain if self.trials == 0 => Err(Error::InvalidArgument("trials must be positive".into())),
            Strategy::Stratified { per_stratum: 0, .. } => {
                Err(Error::InvalidArgument("per-stratum trials must be positive".into()))
            }
            Strategy::Stratified { eps_tail, .. } if !(eps_tail > 0.0 && eps_tail < 1.0) => {
                Err(Error::InvalidArgument(format!("eps_tail = {eps_tail} must lie in (0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stratum {
    pub k: usize,
    /// `P(K = k)`.
    pub weight: f64,
    pub trials: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub p: f64,
    pub d_plus: usize,
    pub trials: u64,
    pub failures: u64,
    pub miscorrections: u64,
    pub estimate: f64,
    pub sigma: f64,
    pub ci95: [f64; 2],
    pub strategy: &'static str,
    /// Probability mass of the strata that were not simulated; the true
    /// failure probability may exceed the estimate by at most this much.
    pub tail_bound: Option<f64>,
    pub eps_tail: Option<f64>,
    pub strata: Option<Vec<Stratum>>,
}

/// Flips every bit of a `rows x width` array independently with probability
/// `p`.
pub fn channel<R: Rng>(array: &mut [u128], width: usize, p: f64, rng: &mut R) {
    if p <= 0.0 {
        return;
    }
    let total = array.len() * width;
    if p < 0.25 {
        // jump straight to the next flipped bit
        let log_q = (-p).ln_1p();
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.random();
            let gap = ((1.0 - u).ln() / log_q).floor();
            if gap >= (total - pos) as f64 {
                break;
            }
            pos += gap as usize;
            array[pos / width] ^= 1u128 << (pos % width);
            pos += 1;
            if pos >= total {
                break;
            }
        }
    } else {
        for row in array.iter_mut() {
            for j in 0..width {
                if rng.random_bool(p) {
                    *row ^= 1u128 << j;
                }
            }
        }
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Default)]
struct Tally {
    failures: u64,
    miscorrections: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            failures: self.failures + o.failures,
            miscorrections: self.miscorrections + o.miscorrections,
        }
    }
}

/// Runs `trials` trials; trial `t` draws its error pattern from `errors`
/// with stream `stream_base + t`. The decoder is linear, so decoding the
/// error pattern against the all-zero array is equivalent to decoding any
/// transmitted codeword plus that pattern.
fn run_trials<F>(pc: &ProductCode, d_plus: usize, trials: u64, seed: u64, stream_base: u64, errors: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng, &mut [u128]) + Sync,
{
    let zero = vec![0u128; pc.rows()];
    (0..trials.div_ceil(TRIAL_BLOCK))
        .into_par_iter()
        .map(|block| {
            let mut tally = Tally::default();
            let mut array = vec![0u128; pc.rows()];
            let end = ((block + 1) * TRIAL_BLOCK).min(trials);
            for t in block * TRIAL_BLOCK..end {
                let mut rng = trial_rng(seed, stream_base + t);
                array.fill(0);
                errors(&mut rng, &mut array);
                match pc.decode(&mut array, d_plus, &zero).class {
                    OutcomeClass::Success => {}
                    OutcomeClass::DetectedFailure => tally.failures += 1,
                    OutcomeClass::Miscorrection => {
                        tally.failures += 1;
                        tally.miscorrections += 1;
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, |a, b| a + b)
}

/// Agresti-Coull adjusted proportion and its standard error.
fn adjusted(failures: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64 + 4.0;
    let q = (failures as f64 + 2.0) / n;
    (q, (q * (1.0 - q) / n).sqrt())
}

/// Estimates the probability that one transmission is not recovered.
pub fn failure_probability(pc: &ProductCode, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    match cfg.strategy {
        Strategy::Plain => Ok(plain(pc, cfg)),
        Strategy::Stratified {
            kmax,
            per_stratum,
            eps_tail,
        } => stratified(pc, cfg, kmax, per_stratum, eps_tail),
    }
}

fn plain(pc: &ProductCode, cfg: &SimConfig) -> SimResult {
    let width = pc.cols();
    let tally = run_trials(pc, cfg.d_plus, cfg.trials, cfg.master_seed, 0, |rng, a| {
        channel(a, width, cfg.p, rng)
    });
    let estimate = tally.failures as f64 / cfg.trials as f64;
    let (centre, sigma) = adjusted(tally.failures, cfg.trials);
    SimResult {
        p: cfg.p,
        d_plus: cfg.d_plus,
        trials: cfg.trials,
        failures: tally.failures,
        miscorrections: tally.miscorrections,
        estimate,
        sigma,
        ci95: [(centre - 1.96 * sigma).max(0.0), (centre + 1.96 * sigma).min(1.0)],
        strategy: "plain",
        tail_bound: None,
        eps_tail: None,
        strata: None,
    }
}

fn stratified(
    pc: &ProductCode,
    cfg: &SimConfig,
    kmax: Option<usize>,
    per_stratum: u64,
    eps_tail: f64,
) -> Result<SimResult> {
    let width = pc.cols();
    let cells = pc.rows() * width;
    let pmf = BinomialPmf::new(cells, cfg.p);
    let kmax = match kmax {
        Some(k) => k.min(cells),
        None => pmf.smallest_k_with_tail_below(eps_tail),
    };
    let weights: Vec<f64> = (0..=kmax).map(|k| pmf.get(k)).collect();
    // strata this light cannot move the estimate by eps_tail in total
    let floor = eps_tail / (kmax + 1) as f64;
    let mut tail = pmf.upper_tail(kmax);
    let mut strata = Vec::new();
    let mut tally = Tally::default();
    for (k, &w) in weights.iter().enumerate() {
        if w < floor {
            tail += w;
            continue;
        }
        let stream_base = ((k as u64) + 1) << STRATUM_STREAM_SHIFT;
        let t = run_trials(pc, cfg.d_plus, per_stratum, cfg.master_seed, stream_base, |rng, a| {
            let mut picked = Vec::with_capacity(k);
            sample_subset(rng, cells, k, &mut picked);
            for &pos in &picked {
                a[pos / width] ^= 1u128 << (pos % width);
            }
        });
        tally = tally + t;
        strata.push(Stratum {
            k,
            weight: w,
            trials: per_stratum,
            failures: t.failures,
        });
    }
    let estimate: f64 = strata
        .iter()
        .map(|s| s.weight * s.failures as f64 / s.trials as f64)
        .sum();
    let variance: f64 = strata
        .iter()
        .map(|s| {
            let (_, sd) = adjusted(s.failures, s.trials);
            (s.weight * sd).powi(2)
        })
        .sum();
    let sigma = variance.sqrt();
    Ok(SimResult {
        p: cfg.p,
        d_plus: cfg.d_plus,
        trials: strata.iter().map(|s| s.trials).sum(),
        failures: tally.failures,
        miscorrections: tally.miscorrections,
        estimate,
        sigma,
        ci95: [(estimate - 1.96 * sigma).max(0.0), (estimate + 1.96 * sigma + tail).min(1.0)],
        strategy: "stratified",
        tail_bound: Some(tail),
        eps_tail: Some(eps_tail),
        strata: Some(strata),
    })
}

/// `P(K = k)` for `K ~ Binomial(n, p)`, evaluated exactly from the binary
/// expansion of `p` and rounded to `f64` only at the end.
pub struct BinomialPmf {
    n: usize,
    /// `p = a / b` exactly; `b` is a power of two.
    a: BigUint,
    b: BigUint,
    /// `b^n`
    denominator: BigUint,
}

impl BinomialPmf {
    pub fn new(n: usize, p: f64) -> Self {
        let q = BigRational::from_float(p).expect("finite probability");
        let a = q.numer().to_biguint().expect("nonnegative probability");
        let b = q.denom().to_biguint().unwrap();
        let denominator = b.pow(n as u32);
        Self { n, a, b, denominator }
    }

    /// Exact numerator `C(n, k) a^k (b - a)^(n - k)` over `b^n`.
    fn numerator(&self, k: usize) -> BigUint {
        if k > self.n {
            return BigUint::zero();
        }
        crate::gf2::binomial(self.n as u64, k as u64)
            * self.a.pow(k as u32)
            * (&self.b - &self.a).pow((self.n - k) as u32)
    }

    pub fn get(&self, k: usize) -> f64 {
        ratio_to_f64(&self.numerator(k), &self.denominator)
    }

    /// `P(K > k)`.
    pub fn upper_tail(&self, k: usize) -> f64 {
        let below: BigUint = (0..=k.min(self.n)).map(|j| self.numerator(j)).sum();
        ratio_to_f64(&(&self.denominator - below), &self.denominator)
    }

    /// Smallest `k` with `P(K > k) < eps`.
    pub fn smallest_k_with_tail_below(&self, eps: f64) -> usize {
        let mut below = BigUint::zero();
        // numerators follow C(n,k+1)/C(n,k) = (n-k)/(k+1), so step exactly
        let c = &self.b - &self.a;
        let mut term = c.pow(self.n as u32);
        for k in 0..=self.n {
            below += &term;
            if ratio_to_f64(&(&self.denominator - &below), &self.denominator) < eps {
                return k;
            }
            if k < self.n {
                if c.is_zero() {
                    term = if k + 1 == self.n { self.a.pow(self.n as u32) } else { BigUint::zero() };
                } else {
                    term = term * (self.n - k) * &self.a / ((k + 1) * &c);
                }
            }
        }
        self.n
    }
}

/// `num / den` rounded to `f64`, for arbitrarily large operands.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // keep 64 significant bits in the quotient
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mut v = q.to_f64().unwrap();
    let mut s = shift;
    while s > 0 {
        let step = s.min(1000);
        v *= (-(step as f64)).exp2();
        s -= step;
    }
    while s < 0 {
        let step = (-s).min(1000);
        v *= (step as f64).exp2();
        s += step;
    }
    v
}
