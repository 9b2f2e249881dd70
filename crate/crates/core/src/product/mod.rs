//! Product of two [72,64,4] codes used as a memory array code, with a
//! single-pass erasure decoder and a failure-probability simulator.

mod decoder;
mod sim;

pub use decoder::{
    transpose, CorrectedVia, DecodeOutcome, LineCode, OutcomeClass, ProductCode, MAX_LINE,
};
pub use sim::{channel, failure_probability, BinomialPmf, SimConfig, SimResult, Strategy, Stratum};

/// Published failure probabilities: channel error probabilities, then one
/// row per `d_plus = 3, 4, 5, 6`.
pub const TABLE2_PRINTED_P: [f64; 5] = [1e-1, 1e-2, 5e-3, 1e-3, 5e-4];
pub const TABLE2_PRINTED: [(usize, [f64; 5]); 4] = [
    (3, [1.0, 0.996, 0.250, 1.1e-9, 2.3e-14]),
    (4, [1.0, 0.988, 0.092, 1.6e-12, 5.1e-18]),
    (5, [1.0, 0.967, 0.027, 7.0e-14, 1.045e-18]),
    (6, [1.0, 0.926, 0.008, 5.8e-14, 1.029e-18]),
];

/// The published value for `(p, d_plus)`, if the table has one.
pub fn table2_printed(p: f64, d_plus: usize) -> Option<f64> {
    let col = TABLE2_PRINTED_P.iter().position(|&q| (q - p).abs() <= 1e-12 * q)?;
    TABLE2_PRINTED.iter().find(|(d, _)| *d == d_plus).map(|(_, row)| row[col])
}
