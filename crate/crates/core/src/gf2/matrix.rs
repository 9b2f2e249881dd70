use std::fmt;
use std::str::FromStr;

use super::BitVector;
use crate::error::{Error, Result};

/// Dense row-major matrix over GF(2).
///
/// Each row is a [`BitVector`] of length `cols`; within a row the lowest
/// column index is the least significant bit of the first word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows. All rows must have the same length; an
    /// empty row list gives a `0 x cols` matrix.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::InvalidArgument(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self { rows, cols })
    }

    /// Parses rows written as strings of `0`/`1`.
    pub fn from_row_strings(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let parsed = rows
            .iter()
            .map(|r| parse_row(r, cols))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed, cols)
    }

    /// Builds an `rows x words.len()` matrix whose column `j` is the low
    /// `rows` bits of `words[j]` (bit `i` = row `i`).
    pub fn from_column_words(rows: usize, words: &[u64]) -> Self {
        assert!(rows <= 64);
        let mut m = Self::zeros(rows, words.len());
        for (j, &w) in words.iter().enumerate() {
            for i in 0..rows {
                if (w >> i) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value)
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits((0..self.rows()).map(|i| self.get(i, j)))
    }

    /// Column `j` packed into a word, row `i` at bit `i`. Requires at most
    /// 64 rows.
    pub fn column_word(&self, j: usize) -> u64 {
        assert!(self.rows() <= 64, "column_word needs at most 64 rows");
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, r)| acc | (u64::from(r.get(j)) << i))
    }

    /// All columns as packed words, or an error when there are more than 64
    /// rows.
    pub fn column_words(&self) -> Result<Vec<u64>> {
        if self.rows() > 64 {
            return Err(Error::InvalidArgument(format!(
                "packed column kernels support at most 64 rows, matrix has {}",
                self.rows()
            )));
        }
        Ok((0..self.cols).map(|j| self.column_word(j)).collect())
    }

    /// GF(2) rank by Gaussian elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut scratch = self.rows.clone();
        eliminate(&mut scratch, self.cols).len()
    }

    /// Reduced row echelon form and its pivot columns. Zero rows are
    /// dropped, so the result has `rank` rows.
    pub fn reduced_row_echelon(&self) -> (BitMatrix, Vec<usize>) {
        let mut scratch = self.rows.clone();
        let pivots = eliminate(&mut scratch, self.cols);
        scratch.truncate(pivots.len());
        (
            BitMatrix {
                rows: scratch,
                cols: self.cols,
            },
            pivots,
        )
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<BitMatrix> {
        check_indices(idx, self.cols)?;
        let rows = self
            .rows
            .iter()
            .map(|r| BitVector::from_bits(idx.iter().map(|&j| r.get(j))))
            .collect();
        Ok(BitMatrix {
            rows,
            cols: idx.len(),
        })
    }

    /// Whether the listed columns are linearly independent.
    pub fn columns_independent(&self, idx: &[usize]) -> Result<bool> {
        let sub = self.select_columns(idx)?;
        Ok(idx.is_empty() || sub.rank() == idx.len())
    }

    /// Removes the listed columns, keeping the rest in order.
    pub fn remove_columns(&self, idx: &[usize]) -> Result<BitMatrix> {
        check_indices(idx, self.cols)?;
        let mut drop = vec![false; self.cols];
        for &j in idx {
            drop[j] = true;
        }
        let keep: Vec<usize> = (0..self.cols).filter(|&j| !drop[j]).collect();
        self.select_columns(&keep)
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != other.rows() {
            return Err(Error::InvalidArgument(format!(
                "hconcat of {} and {} rows",
                self.rows(),
                other.rows()
            )));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(BitMatrix {
            rows,
            cols: self.cols + other.cols,
        })
    }

    /// Stacks `other` below `self`.
    pub fn vconcat(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::InvalidArgument(format!(
                "vconcat of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            rows,
            cols: self.cols,
        })
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        BitVector::from_bits(self.rows.iter().map(|r| r.dot(x)))
    }

    /// Text form: `rows cols` header, then one line of `0`/`1` per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols);
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad dimension `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("header must be `rows cols`, got `{header}`")));
        };
        let body: Vec<BitVector> = lines.map(|l| parse_row(l, cols)).collect::<Result<_>>()?;
        if body.len() != rows {
            return Err(Error::Parse(format!(
                "header declares {rows} rows, found {}",
                body.len()
            )));
        }
        BitMatrix::from_rows(body, cols)
    }
}

impl FromStr for BitMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BitMatrix::from_text(s)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

fn parse_row(line: &str, cols: usize) -> Result<BitVector> {
    if line.len() != cols {
        return Err(Error::Parse(format!(
            "row `{line}` has {} symbols, expected {cols}",
            line.len()
        )));
    }
    line.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("unexpected symbol `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()
        .map(BitVector::from_bits)
}

fn check_indices(idx: &[usize], cols: usize) -> Result<()> {
    let mut seen = vec![false; cols];
    for &j in idx {
        if j >= cols {
            return Err(Error::IndexOutOfRange { index: j, cols });
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::DuplicateIndex(j));
        }
    }
    Ok(())
}

/// In-place reduction to reduced row echelon form; returns pivot columns.
/// Rows `0..pivots.len()` hold the nonzero part afterwards.
fn eliminate(rows: &mut [BitVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(next, p);
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}
