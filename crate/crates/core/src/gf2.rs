//! Dense bit-packed linear algebra over GF(2).
//!
//! Matrices are row-major; `x·M` denotes the combination `Σ xᵢ·rowᵢ`. All
//! elimination picks the lowest-index pivot row, so reduced forms are
//! reproducible.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
}

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + bit)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::WidthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds from 0/1 rows; all rows must share a width.
    pub fn from_bits(rows: &[&[u8]]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| BitVector::from_bits(r.iter().map(|&b| b != 0)))
            .collect();
        Self::from_rows(cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones_iter() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `x·M`, the combination of rows selected by `x`.
    pub fn combine_rows(&self, x: &BitVector) -> Result<BitVector, Gf2Error> {
        if x.len() != self.rows {
            return Err(Gf2Error::WidthMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.cols);
        for i in x.ones_iter() {
            out.xor_assign(&self.data[i]);
        }
        Ok(out)
    }

    /// `M v`, one inner product per row.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::WidthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(BitVector::from_bits(self.data.iter().map(|row| row.dot(v))))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::WidthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|row| other.combine_rows(row))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BitMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self, false).rank()
    }

    /// Coefficients `x` with `x·self = target`, or `None` if `target` is
    /// outside the row space.
    pub fn solve_in_span(&self, target: &BitVector) -> Result<Option<BitVector>, Gf2Error> {
        if target.len() != self.cols {
            return Err(Gf2Error::WidthMismatch {
                expected: self.cols,
                got: target.len(),
            });
        }
        let solution = Echelon::new(self, true).solve(target);
        if let Some(x) = &solution {
            assert_eq!(&self.combine_rows(x)?, target, "span solution failed verification");
        }
        Ok(solution)
    }

    pub fn in_row_space(&self, target: &BitVector) -> Result<bool, Gf2Error> {
        if target.len() != self.cols {
            return Err(Gf2Error::WidthMismatch {
                expected: self.cols,
                got: target.len(),
            });
        }
        Ok(Echelon::new(self, false).reduce(target).0.is_zero())
    }

    /// Basis of the left kernel `{x : x·M = 0}`; it has `rows − rank` vectors.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        Echelon::new(self, true).kernel()
    }

    /// ASCII dump, one row per line.
    pub fn to_grid_string(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for row in &self.data {
            for c in 0..self.cols {
                s.push(if row.get(c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        write!(f, "{}", self.to_grid_string())
    }
}

/// Reduced row echelon form, optionally tracking which original rows make up
/// each reduced row.
struct Echelon {
    reduced: Vec<BitVector>,
    history: Option<Vec<BitVector>>,
    /// (pivot column, reduced row index), by increasing column
    pivots: Vec<(usize, usize)>,
    rows: usize,
}

impl Echelon {
    fn new(m: &BitMatrix, track: bool) -> Self {
        let mut reduced = m.data.clone();
        let mut history = track.then(|| (0..m.rows).map(|i| BitVector::unit(m.rows, i)).collect::<Vec<_>>());
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..m.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| reduced[r].get(col)) else {
                continue;
            };
            reduced.swap(p, next);
            if let Some(h) = history.as_mut() {
                h.swap(p, next);
            }
            let pivot_row = reduced[next].clone();
            let pivot_hist = history.as_ref().map(|h| h[next].clone());
            for r in 0..m.rows {
                if r != next && reduced[r].get(col) {
                    reduced[r].xor_assign(&pivot_row);
                    if let (Some(h), Some(ph)) = (history.as_mut(), pivot_hist.as_ref()) {
                        h[r].xor_assign(ph);
                    }
                }
            }
            pivots.push((col, next));
            next += 1;
        }
        Self {
            reduced,
            history,
            pivots,
            rows: m.rows,
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Residual of `target` after clearing pivot columns, and the combination used.
    fn reduce(&self, target: &BitVector) -> (BitVector, BitVector) {
        let mut residual = target.clone();
        let mut combo = BitVector::zeros(self.rows);
        for &(col, r) in &self.pivots {
            if residual.get(col) {
                residual.xor_assign(&self.reduced[r]);
                if let Some(h) = &self.history {
                    combo.xor_assign(&h[r]);
                }
            }
        }
        (residual, combo)
    }

    fn solve(&self, target: &BitVector) -> Option<BitVector> {
        let (residual, combo) = self.reduce(target);
        residual.is_zero().then_some(combo)
    }

    fn kernel(&self) -> Vec<BitVector> {
        let history = self.history.as_ref().expect("kernel needs row history");
        (self.rank()..self.rows).map(|r| history[r].clone()).collect()
    }
}
