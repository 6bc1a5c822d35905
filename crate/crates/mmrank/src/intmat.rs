use std::fmt;

use crate::gf2::MAX_DIM;
use crate::mat::Mat;

/// Dense matrix with signed integer entries.
///
/// Carries coefficients both for schemes over Z and for schemes over
/// Z mod 2^k; in the latter case entries are kept as balanced
/// representatives in (-2^(k-1), 2^(k-1)].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMatrix {
    rows: u8,
    cols: u8,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&rows) && (1..=MAX_DIM).contains(&cols),
            "matrix dimensions must be in 1..={MAX_DIM}"
        );
        IntMatrix {
            rows: rows as u8,
            cols: cols as u8,
            data: vec![0; rows * cols],
        }
    }

    pub fn unit(rows: usize, cols: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zero(rows, cols);
        m.set(r, c, 1);
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let mut m = Self::zero(rows, cols);
        m.data.copy_from_slice(entries);
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut m = Self::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
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
    pub fn get(&self, r: usize, c: usize) -> i64 {
        debug_assert!(r < self.rows() && c < self.cols());
        self.data[r * self.cols() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows() && c < self.cols());
        let cols = self.cols();
        self.data[r * cols + c] = v;
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [i64] {
        &mut self.data
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// Largest absolute entry value.
    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// Balanced representative of `v` mod 2^k, in (-2^(k-1), 2^(k-1)].
pub fn balanced_mod2k(v: i64, k: u32) -> i64 {
    debug_assert!((1..=62).contains(&k));
    let modulus = 1i64 << k;
    let half = 1i64 << (k - 1);
    let r = v.rem_euclid(modulus);
    if r > half {
        r - modulus
    } else {
        r
    }
}

impl Mat for IntMatrix {
    fn rows(&self) -> usize {
        self.rows()
    }

    fn cols(&self) -> usize {
        self.cols()
    }

    fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix::zero(rows, cols)
    }

    fn is_zero(&self) -> bool {
        self.is_zero()
    }

    fn entry(&self, r: usize, c: usize) -> i64 {
        self.get(r, c)
    }

    fn transposed(&self) -> Self {
        IntMatrix::from_fn(self.cols(), self.rows(), |r, c| self.get(c, r))
    }

    fn embedded(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> Self {
        assert!(row_off + self.rows() <= rows && col_off + self.cols() <= cols);
        let mut out = IntMatrix::zero(rows, cols);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.data[(row_off + r) * cols + (col_off + c)] = self.get(r, c);
            }
        }
        out
    }

    fn cropped(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self {
        IntMatrix::from_fn(keep_rows.len(), keep_cols.len(), |r, c| {
            self.get(keep_rows[r], keep_cols[c])
        })
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}:", self.rows, self.cols)?;
        for r in 0..self.rows() {
            write!(f, " [")?;
            for c in 0..self.cols() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}
