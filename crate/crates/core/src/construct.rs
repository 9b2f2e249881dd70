//! Parity-check matrices of the distance-4 quasi-perfect family.
//!
//! Every code here is grown from a small seed by the doubling construction
//!
//! ```text
//!        [ 0 ... 0 | 1 ... 1 ]
//! H' =   [---------+---------]
//!        [    H    |    H    ]
//! ```
//!
//! which doubles the length and adds one check bit. Starting from `M`
//! gives the extended Hamming codes, starting from `S` gives the Panchenko
//! codes, and starting from a quasi-perfect `[2^g+1, 2^g+1-(g+2), 4]` seed
//! gives the rest of the family (lengths `2^(r-2) + 2^(r-2-g)`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::spectrum;

/// Named seed matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Seed {
    /// 2x2 matrix `[01; 11]`, the trivial `[2,0]` code.
    M,
    /// 4x5 matrix of the unit vectors and the all-ones column, `[5,1,5]`.
    S,
    /// Extended Hamming `[4,1,4]`, i.e. `M` doubled once.
    Eh3,
    /// A quasi-perfect `[9,4,4]` code with redundancy 5 (the `g = 3` seed).
    Example9x5,
}

impl Seed {
    pub const ALL: [Seed; 4] = [Seed::M, Seed::S, Seed::Eh3, Seed::Example9x5];

    pub fn name(self) -> &'static str {
        match self {
            Seed::M => "M",
            Seed::S => "S",
            Seed::Eh3 => "EH3",
            Seed::Example9x5 => "example_9_5",
        }
    }

    fn rows(self) -> &'static [&'static str] {
        match self {
            Seed::M => &["01", "11"],
            Seed::S => &["10001", "01001", "00101", "00011"],
            Seed::Eh3 => &["0011", "0101", "1111"],
            Seed::Example9x5 => &[
                "000001111",
                "100010000",
                "010011001",
                "001010101",
                "000110011",
            ],
        }
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Seed {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Seed::ALL
            .into_iter()
            .find(|seed| seed.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSeed(s.to_string()))
    }
}

/// Where the undoubled base of a code comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Seed(Seed),
    /// Any other matrix (loaded from a file, or a shortened code that was
    /// doubled afterwards). The string is a free-form label.
    Custom(String),
}

/// Construction trace of a code: `base`, doubled `doublings` times, then
/// with the `shortened` columns removed (indices into the doubled matrix).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub base: Base,
    pub doublings: u32,
    /// The `g` parameter of the length formula, for codes built by
    /// [`general_qp`] (and [`panchenko`], which is `g = 2`).
    pub g: Option<u32>,
    pub shortened: Vec<usize>,
}

/// Parameters of an `[n, n-r, d]` code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub r: usize,
    /// Minimum distance; `None` when the code has no nonzero codeword.
    pub d: Option<usize>,
    pub lineage: Lineage,
}

/// A binary linear code given by its parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    spec: CodeSpec,
    h: BitMatrix,
}

impl Code {
    /// Wraps an arbitrary matrix; the distance is computed by the spectrum
    /// oracle.
    pub fn from_matrix(h: BitMatrix, label: impl Into<String>) -> Result<Code> {
        if h.cols() == 0 || h.rows() == 0 {
            return Err(Error::InvalidArgument("empty parity-check matrix".into()));
        }
        let d = spectrum::minimum_distance(&h)?;
        Ok(Code {
            spec: CodeSpec {
                n: h.cols(),
                r: h.rows(),
                d,
                lineage: Lineage {
                    base: Base::Custom(label.into()),
                    doublings: 0,
                    g: None,
                    shortened: Vec::new(),
                },
            },
            h,
        })
    }

    /// Reattaches a previously saved spec to its matrix. The dimensions must
    /// agree.
    pub fn with_spec(h: BitMatrix, spec: CodeSpec) -> Result<Code> {
        if spec.n != h.cols() || spec.r != h.rows() {
            return Err(Error::Inconsistent(format!(
                "spec says {}x{}, matrix is {}x{}",
                spec.r,
                spec.n,
                h.rows(),
                h.cols()
            )));
        }
        Ok(Code { spec, h })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn r(&self) -> usize {
        self.spec.r
    }

    pub fn d(&self) -> Option<usize> {
        self.spec.d
    }

    /// Code dimension `n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.n() - self.h.rank()
    }

    /// The base matrix this code was doubled from, recovered from the block
    /// structure of `H`. Fails if the code was shortened after doubling or
    /// the matrix does not have the doubled shape.
    pub fn undoubled_base(&self) -> Result<BitMatrix> {
        let lineage = &self.spec.lineage;
        if !lineage.shortened.is_empty() {
            return Err(Error::LineageAbsent(format!(
                "{} columns were removed after doubling",
                lineage.shortened.len()
            )));
        }
        let k = lineage.doublings as usize;
        if k == 0 {
            return Ok(self.h.clone());
        }
        if k > self.r() || self.n() % (1 << k) != 0 {
            return Err(Error::LineageAbsent("doubling count does not fit the matrix".into()));
        }
        let base_n = self.n() >> k;
        let rows: Vec<BitVector> = (k..self.r())
            .map(|i| BitVector::from_bits((0..base_n).map(|j| self.h.get(i, j))))
            .collect();
        let base = BitMatrix::from_rows(rows, base_n)?;
        let mut rebuilt = base.clone();
        for _ in 0..k {
            rebuilt = double_matrix(&rebuilt)?;
        }
        if rebuilt != self.h {
            return Err(Error::LineageAbsent(
                "matrix does not have the doubled block structure".into(),
            ));
        }
        Ok(base)
    }
}

/// The literal seed matrix.
pub fn seed(seed: Seed) -> Code {
    let h = BitMatrix::from_row_strings(seed.rows()).expect("seed literals are well formed");
    let d = match seed {
        Seed::M => None,
        Seed::S => Some(5),
        Seed::Eh3 | Seed::Example9x5 => Some(4),
    };
    Code {
        spec: CodeSpec {
            n: h.cols(),
            r: h.rows(),
            d,
            lineage: Lineage {
                base: Base::Seed(seed),
                doublings: 0,
                g: None,
                shortened: Vec::new(),
            },
        },
        h,
    }
}

/// Looks up a seed by name (`M`, `S`, `EH3`, `example_9_5`).
pub fn seed_by_name(name: &str) -> Result<Code> {
    Ok(seed(name.parse()?))
}

fn double_matrix(h: &BitMatrix) -> Result<BitMatrix> {
    let n = h.cols();
    let top = BitVector::zeros(n).concat(&BitVector::ones(n));
    let top = BitMatrix::from_rows(vec![top], 2 * n)?;
    top.vconcat(&h.hconcat(h)?)
}

/// One application of the doubling construction.
pub fn double(c: &Code) -> Code {
    let h = double_matrix(&c.h).expect("doubling preserves shape");
    let d = match c.d() {
        None => Some(4),
        Some(d) => Some(d.min(4)),
    };
    let lineage = if c.spec.lineage.shortened.is_empty() {
        Lineage {
            doublings: c.spec.lineage.doublings + 1,
            ..c.spec.lineage.clone()
        }
    } else {
        Lineage {
            base: Base::Custom(format!("shortened [{}, {}] code", c.n(), c.dimension())),
            doublings: 1,
            g: None,
            shortened: Vec::new(),
        }
    };
    Code {
        spec: CodeSpec {
            n: 2 * c.n(),
            r: c.r() + 1,
            d,
            lineage,
        },
        h,
    }
}

fn double_times(c: &Code, times: u32) -> Code {
    (0..times).fold(c.clone(), |acc, _| double(&acc))
}

/// Extended Hamming `[2^(r-1), 2^(r-1) - r, 4]` code, `r >= 3`.
pub fn extended_hamming(r: usize) -> Result<Code> {
    if r < 3 {
        return Err(Error::InvalidArgument(format!(
            "extended Hamming needs r >= 3, got {r}"
        )));
    }
    Ok(double_times(&seed(Seed::Eh3), (r - 3) as u32))
}

/// Panchenko `[5 * 2^(r-4), 5 * 2^(r-4) - r, 4]` code, `r >= 5`, built by
/// repeated doubling of `S`.
pub fn panchenko(r: usize) -> Result<Code> {
    if r < 5 {
        return Err(Error::InvalidArgument(format!("Panchenko codes need r >= 5, got {r}")));
    }
    let mut c = double_times(&seed(Seed::S), (r - 4) as u32);
    c.spec.lineage.g = Some(2);
    Ok(c)
}

/// Panchenko matrix assembled block by block: `2^(r-4)` blocks, block `k`
/// has the `(r-4)`-bit binary form of `k` (most significant bit on top)
/// above a copy of `S`.
pub fn panchenko_blocks(r: usize) -> Result<BitMatrix> {
    if r < 5 {
        return Err(Error::InvalidArgument(format!("Panchenko codes need r >= 5, got {r}")));
    }
    let s = seed(Seed::S).h;
    let label_bits = r - 4;
    let blocks = 1usize << label_bits;
    let n = 5 * blocks;
    let mut h = BitMatrix::zeros(r, n);
    for k in 0..blocks {
        for col in 0..5 {
            let j = 5 * k + col;
            for bit in 0..label_bits {
                let value = (k >> (label_bits - 1 - bit)) & 1 == 1;
                h.set(bit, j, value);
            }
            for i in 0..4 {
                h.set(label_bits + i, j, s.get(i, col));
            }
        }
    }
    Ok(h)
}

fn check_g(r: usize, g: u32) -> Result<()> {
    if r < 5 {
        return Err(Error::InvalidArgument(format!("r must be >= 5, got {r}")));
    }
    let g_us = g as usize;
    if g == 1 || g_us + 3 > r && g != 0 {
        return Err(Error::InvalidArgument(format!(
            "g = {g} is not admissible for r = {r} (allowed: 0, 2..={})",
            r - 3
        )));
    }
    Ok(())
}

/// `(g, n)` pairs with `n = 2^(r-2) + 2^(r-2-g)` for `g = 0, 2, 3, ..., r-3`.
pub fn admissible_lengths(r: usize) -> Result<Vec<(u32, usize)>> {
    if r < 5 {
        return Err(Error::InvalidArgument(format!("r must be >= 5, got {r}")));
    }
    Ok(std::iter::once(0)
        .chain(2..=(r as u32 - 3))
        .map(|g| (g, (1usize << (r - 2)) + (1usize << (r - 2 - g as usize))))
        .collect())
}

/// General member of the family: `r - g - 2` doublings of a seed with
/// redundancy `g + 2` and length `2^g + 1`. For `g = 0` the seed must be
/// `M`, for `g = 2` it must be `S`.
pub fn general_qp(r: usize, g: u32, seed_code: &Code) -> Result<Code> {
    check_g(r, g)?;
    let want_r = g as usize + 2;
    let want_n = (1usize << g) + 1;
    if seed_code.r() != want_r || seed_code.n() != want_n {
        return Err(Error::InvalidArgument(format!(
            "g = {g} needs a {want_r}x{want_n} seed, got {}x{}",
            seed_code.r(),
            seed_code.n()
        )));
    }
    let required = match g {
        0 => Some(Seed::M),
        2 => Some(Seed::S),
        _ => None,
    };
    if let Some(s) = required {
        if seed_code.h != seed(s).h {
            return Err(Error::InvalidArgument(format!("g = {g} requires seed {s}")));
        }
    }
    let mut c = double_times(seed_code, (r - want_r) as u32);
    c.spec.lineage.g = Some(g);
    Ok(c)
}

/// The seed we ship for a given `g`: `M`, `S` and the `[9,4,4]` example.
pub fn default_seed_for(g: u32) -> Option<Code> {
    match g {
        0 => Some(seed(Seed::M)),
        2 => Some(seed(Seed::S)),
        3 => Some(seed(Seed::Example9x5)),
        _ => None,
    }
}

/// Removes the listed columns. The distance is recomputed.
pub fn shorten(c: &Code, cols: &[usize]) -> Result<Code> {
    if cols.len() >= c.n() {
        return Err(Error::InvalidArgument(format!(
            "cannot remove {} of {} columns",
            cols.len(),
            c.n()
        )));
    }
    if cols.is_empty() {
        return Ok(c.clone());
    }
    let h = c.h.remove_columns(cols)?;
    let d = spectrum::minimum_distance(&h)?;
    let mut lineage = c.spec.lineage.clone();
    // keep indices relative to the unshortened matrix
    let original: Vec<usize> = (0..c.spec.n + lineage.shortened.len())
        .filter(|j| !lineage.shortened.contains(j))
        .collect();
    lineage.shortened.extend(cols.iter().map(|&j| original[j]));
    lineage.shortened.sort_unstable();
    Ok(Code {
        spec: CodeSpec {
            n: h.cols(),
            r: c.r(),
            d,
            lineage,
        },
        h,
    })
}

/// Shortens by removing the last `count` columns.
pub fn shorten_trailing(c: &Code, count: usize) -> Result<Code> {
    let cols: Vec<usize> = (c.n().saturating_sub(count)..c.n()).collect();
    shorten(c, &cols)
}

/// Largest redundancy accepted by [`covering_radius`]; the search keeps one
/// byte per syndrome.
pub const COVERING_RADIUS_MAX_ROWS: usize = 24;

/// Covering radius: the least `rho` such that every syndrome in the column
/// space of `H` is a sum of at most `rho` columns. Breadth-first search over
/// the syndrome space, `O(2^r * n)`.
pub fn covering_radius(c: &Code) -> Result<usize> {
    let r = c.r();
    if r > COVERING_RADIUS_MAX_ROWS {
        return Err(Error::budget(
            "covering radius search",
            format!("2^{r} syndromes"),
            format!("2^{COVERING_RADIUS_MAX_ROWS}"),
        ));
    }
    let mut cols = c.h.column_words()?;
    cols.sort_unstable();
    cols.dedup();
    cols.retain(|&w| w != 0);

    let mut seen = vec![false; 1usize << r];
    seen[0] = true;
    let mut frontier = vec![0u64];
    let mut radius = 0;
    loop {
        let mut next = Vec::new();
        for &s in &frontier {
            for &col in &cols {
                let t = (s ^ col) as usize;
                if !seen[t] {
                    seen[t] = true;
                    next.push(t as u64);
                }
            }
        }
        if next.is_empty() {
            return Ok(radius);
        }
        radius += 1;
        frontier = next;
    }
}

/// Whether the code has minimum distance 3 or 4 and covering radius 2.
pub fn is_quasi_perfect(c: &Code) -> Result<bool> {
    let d = spectrum::minimum_distance(&c.h)?;
    if !matches!(d, Some(3) | Some(4)) {
        return Ok(false);
    }
    Ok(covering_radius(c)? == 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_of(c: &Code) -> Vec<String> {
        c.h().row_vectors().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn seeds_are_literal() {
        assert_eq!(rows_of(&seed(Seed::M)), ["01", "11"]);
        let s = seed(Seed::S);
        assert_eq!((s.n(), s.r(), s.dimension()), (5, 4, 1));
        for j in 0..4 {
            assert_eq!(s.h().column(j).iter_ones().collect::<Vec<_>>(), vec![j]);
        }
        assert_eq!(s.h().column(4), BitVector::ones(4));
        let e = seed(Seed::Example9x5);
        assert_eq!((e.n(), e.dimension(), e.d()), (9, 4, Some(4)));
        assert_eq!(rows_of(&e)[2], "010011001");
        assert!("nope".parse::<Seed>().is_err());
        assert_eq!("eh3".parse::<Seed>().unwrap(), Seed::Eh3);
    }

    #[test]
    fn doubling_m_gives_eh3() {
        let d = double(&seed(Seed::M));
        assert_eq!(rows_of(&d), ["0011", "0101", "1111"]);
        assert_eq!(d.h(), seed(Seed::Eh3).h());
        assert_eq!(d.d(), Some(4));
    }

    #[test]
    fn doubling_structure() {
        let c = panchenko(6).unwrap();
        let d = double(&c);
        assert_eq!((d.n(), d.r()), (2 * c.n(), c.r() + 1));
        let top = d.h().row(0);
        assert_eq!(top.weight(), c.n());
        assert!((c.n()..d.n()).all(|j| top.get(j)));
        for i in 1..d.r() {
            for j in 0..c.n() {
                assert_eq!(d.h().get(i, j), d.h().get(i, j + c.n()));
            }
        }
        assert_eq!(d.undoubled_base().unwrap(), *seed(Seed::S).h());
    }

    #[test]
    fn extended_hamming_lengths() {
        assert!(extended_hamming(2).is_err());
        for (r, n) in [(3, 4), (4, 8), (7, 64)] {
            let c = extended_hamming(r).unwrap();
            assert_eq!((c.n(), c.r(), c.dimension(), c.d()), (n, r, n - r, Some(4)));
        }
        assert_eq!(*double(&seed(Seed::Eh3)).h(), *extended_hamming(4).unwrap().h());
    }

    #[test]
    fn panchenko_constructions_agree() {
        assert!(panchenko(4).is_err());
        for r in 5..=10 {
            let c = panchenko(r).unwrap();
            assert_eq!(c.n(), 5 << (r - 4));
            assert_eq!(*c.h(), panchenko_blocks(r).unwrap(), "r={r}");
        }
        let p5 = panchenko_blocks(5).unwrap();
        assert_eq!(p5.row(0).to_string(), "0000011111");
    }

    #[test]
    fn general_qp_examples() {
        let p = general_qp(5, 2, &seed(Seed::S)).unwrap();
        assert_eq!(p.h(), panchenko(5).unwrap().h());
        let eh = general_qp(5, 0, &seed(Seed::M)).unwrap();
        assert_eq!((eh.n(), eh.dimension()), (16, 11));
        assert_eq!(eh.h(), extended_hamming(5).unwrap().h());
        let c = general_qp(6, 3, &seed(Seed::Example9x5)).unwrap();
        assert_eq!((c.n(), c.dimension(), c.d()), (18, 12, Some(4)));
    }

    #[test]
    fn general_qp_rejects_bad_parameters() {
        assert!(general_qp(6, 1, &seed(Seed::M)).is_err());
        assert!(general_qp(6, 4, &seed(Seed::Example9x5)).is_err());
        assert!(general_qp(5, 3, &seed(Seed::Example9x5)).is_err());
        assert!(general_qp(6, 0, &seed(Seed::S)).is_err());
        assert!(general_qp(4, 0, &seed(Seed::M)).is_err());
    }

    #[test]
    fn admissible_length_examples() {
        assert_eq!(admissible_lengths(5).unwrap(), vec![(0, 16), (2, 10)]);
        assert_eq!(admissible_lengths(6).unwrap(), vec![(0, 32), (2, 20), (3, 18)]);
        let r8 = admissible_lengths(8).unwrap();
        assert_eq!(r8.iter().map(|p| p.0).collect::<Vec<_>>(), [0, 2, 3, 4, 5]);
        assert_eq!(r8.iter().map(|p| p.1).collect::<Vec<_>>(), [128, 80, 72, 68, 66]);
        assert!(admissible_lengths(4).is_err());
    }

    #[test]
    fn shortening() {
        let c = extended_hamming(4).unwrap();
        assert_eq!(shorten(&c, &[]).unwrap(), c);
        let s = shorten(&c, &[7]).unwrap();
        assert_eq!((s.n(), s.dimension(), s.d()), (7, 3, Some(4)));
        let mut cols = s.h().column_words().unwrap();
        cols.sort_unstable();
        cols.dedup();
        assert_eq!(cols.len(), 7);
        assert!(shorten(&c, &(0..8).collect::<Vec<_>>()).is_err());
        assert!(s.undoubled_base().is_err());

        let p = shorten_trailing(&panchenko(8).unwrap(), 8).unwrap();
        assert_eq!((p.n(), p.dimension(), p.d()), (72, 64, Some(4)));
        assert_eq!(p.spec().lineage.shortened, (72..80).collect::<Vec<_>>());
        // indices stay relative to the unshortened matrix
        let twice = shorten(&p, &[0]).unwrap();
        assert_eq!(twice.spec().lineage.shortened[0], 0);
        assert_eq!(twice.spec().lineage.shortened.len(), 9);
    }

    #[test]
    fn covering_radius_examples() {
        assert_eq!(covering_radius(&extended_hamming(4).unwrap()).unwrap(), 2);
        assert_eq!(covering_radius(&panchenko(5).unwrap()).unwrap(), 2);
        // [7,4,3] Hamming: all nonzero 3-bit columns, a perfect code
        let ham = Code::from_matrix(BitMatrix::from_column_words(3, &[1, 2, 3, 4, 5, 6, 7]), "hamming")
            .unwrap();
        assert_eq!(ham.d(), Some(3));
        assert_eq!(covering_radius(&ham).unwrap(), 1);
        assert!(!is_quasi_perfect(&ham).unwrap());
    }

    #[test]
    fn quasi_perfect_members() {
        for r in 5..=8 {
            assert!(is_quasi_perfect(&panchenko(r).unwrap()).unwrap());
        }
        for r in 4..=8 {
            assert!(is_quasi_perfect(&extended_hamming(r).unwrap()).unwrap());
        }
        // Removing one column of the [16,11,4] code leaves a syndrome that
        // needs three columns.
        let s = shorten(&extended_hamming(5).unwrap(), &[15]).unwrap();
        assert_eq!(covering_radius(&s).unwrap(), 3);
        assert!(!is_quasi_perfect(&s).unwrap());
    }
}
