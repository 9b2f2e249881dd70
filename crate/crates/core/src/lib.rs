//! Distance-4 quasi-perfect binary codes.
//!
//! * [`gf2`]: bit-packed GF(2) vectors/matrices, exact binomials, k-subset
//!   enumeration.
//! * [`construct`]: seeds, the doubling construction, extended Hamming,
//!   Panchenko and general family members, shortening, covering radius.
//! * [`spectrum`]: weight spectra by the doubling recursions and by an
//!   independent enumeration + MacWilliams oracle.
//! * [`erasure`]: counting correctable erasure patterns of weight `>= d`.
//! * [`product`]: product-code decoder and failure-probability simulation.

pub mod construct;
pub mod error;
pub mod gf2;
pub mod product;
pub mod erasure;
pub mod spectrum;

pub use construct::{Code, CodeSpec, Seed};
pub use error::{Error, ErrorKind, Result};
pub use gf2::{BitMatrix, BitVector};
pub use spectrum::{SpectrumKind, WeightSpectrum};
