//! Closed-form approximations of the correctable fraction for a code with
//! `r` check bits, treating the weight spectrum as binomial.

use crate::error::{Error, Result};

/// Binary entropy in bits; `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Parameter `z` of the approximations: the spectrum is modelled as
/// `A_w ~ 2^-z C(n, w)`, with `r - 1 < z <= r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxParams {
    r: usize,
    z: f64,
}

impl ApproxParams {
    pub fn new(r: usize, z: f64) -> Result<Self> {
        let rf = r as f64;
        if !(z > rf - 1.0 && z <= rf) {
            return Err(Error::InvalidArgument(format!("z = {z} must satisfy {} < z <= {r}", r as i64 - 1)));
        }
        Ok(Self { r, z })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn z(&self) -> f64 {
        self.z
    }
}

/// `2^-z C(n, w)`, computed in log space.
pub fn binomial_spectrum_estimate(n: usize, w: usize, p: ApproxParams) -> f64 {
    if w > n {
        return 0.0;
    }
    (ln_binomial(n, w) / std::f64::consts::LN_2 - p.z).exp2()
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// The two approximate lower bounds on `delta_rho`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBounds {
    /// `1 - 2^(-z + rho h(d/rho))`.
    pub entropy: f64,
    /// `1 - 2^(rho - z)`; only meaningful for `rho < z`.
    pub weak: Option<f64>,
}

pub fn delta_entropy_bound(d: usize, rho: usize, p: ApproxParams) -> Result<EntropyBounds> {
    if rho < d || rho == 0 {
        return Err(Error::InvalidArgument(format!("need rho >= d, got rho = {rho}, d = {d}")));
    }
    let exponent = -p.z + rho as f64 * binary_entropy(d as f64 / rho as f64);
    let rf = rho as f64;
    Ok(EntropyBounds {
        entropy: 1.0 - exponent.exp2(),
        weak: (rf < p.z).then(|| 1.0 - (rf - p.z).exp2()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - 0.4999).abs() < 1e-3);
    }

    #[test]
    fn params_are_validated() {
        assert!(ApproxParams::new(7, 7.0).is_ok());
        assert!(ApproxParams::new(7, 6.5).is_ok());
        assert!(ApproxParams::new(7, 6.0).is_err());
        assert!(ApproxParams::new(7, 7.5).is_err());
    }

    #[test]
    fn binomial_model() {
        let p = ApproxParams::new(3, 3.0).unwrap();
        assert!((binomial_spectrum_estimate(8, 4, p) - 70.0 / 8.0).abs() < 1e-9);
        assert_eq!(binomial_spectrum_estimate(8, 9, p), 0.0);
    }

    #[test]
    fn bounds_are_ordered() {
        let p = ApproxParams::new(8, 8.0).unwrap();
        for rho in 4..8 {
            let b = delta_entropy_bound(4, rho, p).unwrap();
            assert!(b.entropy >= b.weak.unwrap() - 1e-12, "rho={rho}: {b:?}");
        }
        assert_eq!(delta_entropy_bound(4, 8, p).unwrap().weak, None);
        assert!(delta_entropy_bound(4, 3, p).is_err());
    }
}
