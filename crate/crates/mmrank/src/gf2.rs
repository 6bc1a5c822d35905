use std::fmt;

use rand::Rng;
use smallvec::SmallVec;

use crate::mat::Mat;

/// Hard bound on matrix dimensions: one row fits in one 32-bit word.
pub const MAX_DIM: usize = 32;

/// Dense matrix over Z_2 with bit-packed rows.
///
/// Row `r`, column `c` is bit `c` of `words[r]`. Unused high bits of each
/// row word are always zero, so equality, ordering and hashing are plain
/// word comparisons.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gf2Matrix {
    rows: u8,
    cols: u8,
    words: SmallVec<[u32; 8]>,
}

impl Gf2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&rows) && (1..=MAX_DIM).contains(&cols),
            "matrix dimensions must be in 1..={MAX_DIM}"
        );
        Gf2Matrix {
            rows: rows as u8,
            cols: cols as u8,
            words: smallvec::smallvec![0; rows],
        }
    }

    /// The unit matrix e_{r,c}: a single 1 at (r, c).
    pub fn unit(rows: usize, cols: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zero(rows, cols);
        m.set(r, c, true);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.words[r] |= 1 << c;
                }
            }
        }
        m
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let mask = Self::col_mask(cols);
        let mut m = Self::zero(rows, cols);
        for w in m.words.iter_mut() {
            *w = rng.gen::<u32>() & mask;
        }
        m
    }

    fn col_mask(cols: usize) -> u32 {
        if cols == 32 {
            u32::MAX
        } else {
            (1u32 << cols) - 1
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows as usize
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols as usize
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows() && c < self.cols());
        (self.words[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows() && c < self.cols());
        if v {
            self.words[r] |= 1 << c;
        } else {
            self.words[r] &= !(1 << c);
        }
    }

    pub fn flip_bit(&mut self, r: usize, c: usize) {
        assert!(r < self.rows() && c < self.cols());
        self.words[r] ^= 1 << c;
    }

    #[inline]
    pub fn row_word(&self, r: usize) -> u32 {
        self.words[r]
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place addition over Z_2 (word-wise XOR).
    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w ^= o;
        }
    }

    pub fn xored(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Number of ones.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the entrywise product with `other` (the GF(2) inner
    /// product of the two matrices viewed as bit vectors).
    #[inline]
    pub fn dot_parity(&self, other: &Self) -> bool {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut acc = 0u32;
        for (w, o) in self.words.iter().zip(other.words.iter()) {
            acc ^= w & o;
        }
        acc.count_ones() & 1 == 1
    }
}

impl Mat for Gf2Matrix {
    fn rows(&self) -> usize {
        self.rows()
    }

    fn cols(&self) -> usize {
        self.cols()
    }

    fn zero(rows: usize, cols: usize) -> Self {
        Gf2Matrix::zero(rows, cols)
    }

    fn is_zero(&self) -> bool {
        self.is_zero()
    }

    fn entry(&self, r: usize, c: usize) -> i64 {
        self.get(r, c) as i64
    }

    fn transposed(&self) -> Self {
        Gf2Matrix::from_fn(self.cols(), self.rows(), |r, c| self.get(c, r))
    }

    fn embedded(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> Self {
        assert!(row_off + self.rows() <= rows && col_off + self.cols() <= cols);
        let mut out = Gf2Matrix::zero(rows, cols);
        for r in 0..self.rows() {
            out.words[row_off + r] = self.words[r] << col_off;
        }
        out
    }

    fn cropped(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self {
        Gf2Matrix::from_fn(keep_rows.len(), keep_cols.len(), |r, c| {
            self.get(keep_rows[r], keep_cols[c])
        })
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix({}x{}:", self.rows, self.cols)?;
        for r in 0..self.rows() {
            write!(f, " ")?;
            for c in 0..self.cols() {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
        }
        write!(f, ")")
    }
}
