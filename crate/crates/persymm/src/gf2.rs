//! Dense bit matrices over GF(2) and persymmetric constructors.
//!
//! Rows are packed little-endian into `u64` words (bit `c & 63` of word
//! `c >> 6` holds column `c`). Unused bits past the last column are kept
//! zero so that whole-word operations stay exact.

use std::fmt;

use crate::shape::ShapeError;

/// A fixed-length sequence of bits, used for anti-diagonal coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds from the low `len` bits of `value`. Panics if `len > 64`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 holds at most 64 bits");
        let mut b = Bits::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            b.words[0] = value & mask;
        }
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Bits::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        if v {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    /// The whole sequence as one word, when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    /// Entrywise XOR. Lengths must agree.
    pub fn xor(&self, other: &Bits) -> Result<Bits, ShapeError> {
        if self.len != other.len {
            return Err(ShapeError::LengthMismatch {
                what: "bit sequence",
                expected: self.len,
                got: other.len,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Bits {
            len: self.len,
            words,
        })
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    /// Builds from one `u64` per row; requires `cols <= 64`.
    pub fn from_rows_u64(rows: &[u64], cols: usize) -> Self {
        assert!(cols <= 64);
        let mask = if cols == 64 {
            u64::MAX
        } else {
            (1u64 << cols) - 1
        };
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, &w) in rows.iter().enumerate() {
            m.data[r * m.wpr] = w & mask;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.wpr + (c >> 6)] >> (c & 63) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.wpr + (c >> 6)];
        if v {
            *w |= 1 << (c & 63);
        } else {
            *w &= !(1 << (c & 63));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.wpr..(r + 1) * self.wpr]
    }

    /// Row `r` as one word, when the width fits.
    pub fn row_as_u64(&self, r: usize) -> Option<u64> {
        if self.cols > 64 {
            return None;
        }
        Some(self.row(r)[0])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Entrywise XOR of equally shaped matrices.
    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix, ShapeError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ShapeError::DimensionMismatch {
                what: "matrix xor",
                expected: (self.rows, self.cols),
                got: (other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    /// The first `k2` columns.
    pub fn truncate_columns(&self, k2: usize) -> Result<BitMatrix, ShapeError> {
        if k2 > self.cols || k2 == 0 {
            return Err(ShapeError::ColumnRange {
                requested: k2,
                cols: self.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, k2);
        let full = k2 / 64;
        let rem = k2 & 63;
        for r in 0..self.rows {
            let src = self.row(r);
            let dst = &mut out.data[r * out.wpr..(r + 1) * out.wpr];
            dst[..full].copy_from_slice(&src[..full]);
            if rem != 0 {
                dst[full] = src[full] & ((1u64 << rem) - 1);
            }
        }
        Ok(out)
    }

    /// Row rank over GF(2). Works on a scratch copy; `self` is unchanged.
    ///
    /// Forward elimination with pivoting on the first set bit; no
    /// normalization is needed over GF(2).
    pub fn rank(&self) -> usize {
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::with_capacity(self.rows.min(self.cols));
        for r in 0..self.rows {
            let mut row = self.row(r).to_vec();
            loop {
                let Some(p) = first_set_bit(&row) else { break };
                match basis.iter().find(|(q, _)| *q == p) {
                    Some((_, b)) => {
                        for (a, w) in row.iter_mut().zip(b) {
                            *a ^= w;
                        }
                    }
                    None => {
                        basis.push((p, row));
                        break;
                    }
                }
            }
        }
        basis.len()
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The persymmetric matrix with `entry(i, j) = coeffs[i + j]`.
///
/// Requires `coeffs.len() == rows + cols - 1`: one coefficient per
/// anti-diagonal.
pub fn persymmetric_matrix(
    coeffs: &Bits,
    rows: usize,
    cols: usize,
) -> Result<BitMatrix, ShapeError> {
    if rows == 0 || cols == 0 {
        return Err(ShapeError::Degenerate {
            what: "persymmetric matrix",
        });
    }
    if coeffs.len() != rows + cols - 1 {
        return Err(ShapeError::LengthMismatch {
            what: "persymmetric coefficients",
            expected: rows + cols - 1,
            got: coeffs.len(),
        });
    }
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if coeffs.get(r + c) {
                m.set(r, c, true);
            }
        }
    }
    Ok(m)
}

/// Appends the rows of `block` beneath `top`. Column counts must agree.
pub(crate) fn vstack(top: &BitMatrix, block: &BitMatrix) -> Result<BitMatrix, ShapeError> {
    if top.cols != block.cols {
        return Err(ShapeError::DimensionMismatch {
            what: "vertical stack",
            expected: (0, top.cols),
            got: (block.rows, block.cols),
        });
    }
    let cols = top.cols;
    let mut out = BitMatrix::zeros(top.rows + block.rows, cols);
    for r in 0..top.rows {
        for c in 0..top.cols {
            if top.get(r, c) {
                out.set(r, c, true);
            }
        }
    }
    for r in 0..block.rows {
        for c in 0..block.cols {
            if block.get(r, c) {
                out.set(top.rows + r, c, true);
            }
        }
    }
    Ok(out)
}
