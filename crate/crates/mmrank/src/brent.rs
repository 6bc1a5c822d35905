//! Brent equation verification and scheme execution.
//!
//! A scheme with terms (A_l, B_l, C_l) is correct iff for all index tuples
//! (i1,i2), (j1,j2), (k1,k2):
//!
//!   sum_l A_l[i1,i2] * B_l[j1,j2] * C_l[k1,k2]
//!     = [i2 == j1] * [j2 == k1] * [k2 == i1]
//!
//! computed in the scheme's ring. That is (nm)(mp)(pn) equations. The
//! cyclic form matches the p x n storage of C.

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::intmat::{balanced_mod2k, IntMatrix};
use crate::scheme::{Gf2Scheme, IntScheme, Ring};

impl Gf2Scheme {
    /// Check all Brent equations over Z_2.
    ///
    /// Bit-packed: for each pair of an A-entry and a B-entry, the set of
    /// terms where both coefficients are 1 is intersected as machine
    /// words, and the corresponding C components are XOR-accumulated.
    pub fn verify(&self) -> bool {
        let f = self.format();
        let (n, m, p) = (f.n, f.m, f.p);
        let r = self.rank();
        let tw = r.div_ceil(64);
        let terms = self.terms();

        // term sets per A-entry and per B-entry
        let mut ta = vec![0u64; n * m * tw.max(1)];
        let mut tb = vec![0u64; m * p * tw.max(1)];
        for (l, t) in terms.iter().enumerate() {
            let (w, bit) = (l / 64, 1u64 << (l % 64));
            for i1 in 0..n {
                let mut row = t.a.row_word(i1);
                while row != 0 {
                    let i2 = row.trailing_zeros() as usize;
                    row &= row - 1;
                    ta[(i1 * m + i2) * tw + w] |= bit;
                }
            }
            for j1 in 0..m {
                let mut row = t.b.row_word(j1);
                while row != 0 {
                    let j2 = row.trailing_zeros() as usize;
                    row &= row - 1;
                    tb[(j1 * p + j2) * tw + w] |= bit;
                }
            }
        }

        for i1 in 0..n {
            for i2 in 0..m {
                let ta_s = &ta[(i1 * m + i2) * tw..][..tw];
                for j1 in 0..m {
                    for j2 in 0..p {
                        let tb_s = &tb[(j1 * p + j2) * tw..][..tw];
                        let mut acc = [0u32; 32];
                        for w in 0..tw {
                            let mut bits = ta_s[w] & tb_s[w];
                            while bits != 0 {
                                let l = w * 64 + bits.trailing_zeros() as usize;
                                bits &= bits - 1;
                                let c = &terms[l].c;
                                for (k, a) in acc.iter_mut().enumerate().take(p) {
                                    *a ^= c.row_word(k);
                                }
                            }
                        }
                        for (k, &a) in acc.iter().enumerate().take(p) {
                            let expected = if i2 == j1 && k == j2 { 1u32 << i1 } else { 0 };
                            if a != expected {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Execute the bilinear algorithm on concrete bit matrices.
    pub fn apply(&self, x: &Gf2Matrix, y: &Gf2Matrix) -> Result<Gf2Matrix> {
        let f = self.format();
        if x.rows() != f.n || x.cols() != f.m || y.rows() != f.m || y.cols() != f.p {
            return Err(Error::FormatMismatch(format!(
                "inputs {}x{} and {}x{} do not match format {f}",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols()
            )));
        }
        let mut z = Gf2Matrix::zero(f.n, f.p);
        for t in self.terms() {
            if t.a.dot_parity(x) && t.b.dot_parity(y) {
                // Z[i,k] ^= C[k,i]
                for k in 0..f.p {
                    let mut row = t.c.row_word(k);
                    while row != 0 {
                        let i = row.trailing_zeros() as usize;
                        row &= row - 1;
                        z.flip_bit(i, k);
                    }
                }
            }
        }
        Ok(z)
    }
}

/// Verification bound: with rank <= 512 and |entry| <= 2^30, sums of
/// triple products stay well inside i128.
fn assert_verify_bounds(s: &IntScheme) {
    let max = s.max_abs_coefficient().max(1) as u128;
    let bits = 128 - max.leading_zeros();
    let rank_bits = 64 - (s.rank().max(1) as u64).leading_zeros();
    assert!(
        3 * bits + rank_bits <= 126,
        "coefficients too large for exact verification (max |entry| = {max}, rank = {})",
        s.rank()
    );
}

impl IntScheme {
    /// Check all Brent equations, exactly over Z or mod 2^k.
    pub fn verify(&self) -> bool {
        match self.ring() {
            Ring::Integer => {
                assert_verify_bounds(self);
                self.verify_exact()
            }
            Ring::Mod2k(k) => self.verify_mod2k(k),
            Ring::Gf2 => unreachable!("integer carrier is never tagged gf2"),
        }
    }

    fn verify_exact(&self) -> bool {
        let f = self.format();
        let (n, m, p) = (f.n, f.m, f.p);
        let mut acc = vec![0i128; p * n];
        for i1 in 0..n {
            for i2 in 0..m {
                for j1 in 0..m {
                    for j2 in 0..p {
                        acc.iter_mut().for_each(|v| *v = 0);
                        for t in self.terms() {
                            let a = t.a.get(i1, i2);
                            if a == 0 {
                                continue;
                            }
                            let b = t.b.get(j1, j2);
                            if b == 0 {
                                continue;
                            }
                            let w = a as i128 * b as i128;
                            for (v, &c) in acc.iter_mut().zip(t.c.entries()) {
                                *v += w * c as i128;
                            }
                        }
                        for k1 in 0..p {
                            for k2 in 0..n {
                                let expected =
                                    (i2 == j1 && k1 == j2 && k2 == i1) as i128;
                                if acc[k1 * n + k2] != expected {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn verify_mod2k(&self, k: u32) -> bool {
        let f = self.format();
        let (n, m, p) = (f.n, f.m, f.p);
        let mask = (1u64 << k) - 1;
        let mut acc = vec![0u64; p * n];
        for i1 in 0..n {
            for i2 in 0..m {
                for j1 in 0..m {
                    for j2 in 0..p {
                        acc.iter_mut().for_each(|v| *v = 0);
                        for t in self.terms() {
                            let a = t.a.get(i1, i2);
                            if a == 0 {
                                continue;
                            }
                            let b = t.b.get(j1, j2);
                            if b == 0 {
                                continue;
                            }
                            let w = (a as u64).wrapping_mul(b as u64);
                            for (v, &c) in acc.iter_mut().zip(t.c.entries()) {
                                *v = v.wrapping_add(w.wrapping_mul(c as u64));
                            }
                        }
                        for k1 in 0..p {
                            for k2 in 0..n {
                                let expected = (i2 == j1 && k1 == j2 && k2 == i1) as u64;
                                if acc[k1 * n + k2] & mask != expected {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Execute the bilinear algorithm on concrete integer matrices.
    /// Entries are interpreted mod 2^k when the ring is Mod2k.
    pub fn apply(&self, x: &IntMatrix, y: &IntMatrix) -> Result<IntMatrix> {
        let f = self.format();
        if x.rows() != f.n || x.cols() != f.m || y.rows() != f.m || y.cols() != f.p {
            return Err(Error::FormatMismatch(format!(
                "inputs {}x{} and {}x{} do not match format {f}",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols()
            )));
        }
        match self.ring() {
            Ring::Integer => self.apply_exact(x, y),
            Ring::Mod2k(k) => Ok(self.apply_mod2k(x, y, k)),
            Ring::Gf2 => unreachable!("integer carrier is never tagged gf2"),
        }
    }

    fn apply_exact(&self, x: &IntMatrix, y: &IntMatrix) -> Result<IntMatrix> {
        let f = self.format();
        let overflow = || Error::Overflow("apply_scheme");
        let mut z = vec![0i128; f.n * f.p];
        for t in self.terms() {
            let mut xa: i128 = 0;
            for (e, &v) in t.a.entries().iter().zip(x.entries()) {
                xa = xa.checked_add(*e as i128 * v as i128).ok_or_else(overflow)?;
            }
            let mut yb: i128 = 0;
            for (e, &v) in t.b.entries().iter().zip(y.entries()) {
                yb = yb.checked_add(*e as i128 * v as i128).ok_or_else(overflow)?;
            }
            let m_l = xa.checked_mul(yb).ok_or_else(overflow)?;
            if m_l == 0 {
                continue;
            }
            for k in 0..f.p {
                for i in 0..f.n {
                    let c = t.c.get(k, i) as i128;
                    if c != 0 {
                        let slot = &mut z[i * f.p + k];
                        *slot = slot
                            .checked_add(c.checked_mul(m_l).ok_or_else(overflow)?)
                            .ok_or_else(overflow)?;
                    }
                }
            }
        }
        let mut out = IntMatrix::zero(f.n, f.p);
        for (idx, v) in z.into_iter().enumerate() {
            let v = i64::try_from(v).map_err(|_| overflow())?;
            out.entries_mut()[idx] = v;
        }
        Ok(out)
    }

    fn apply_mod2k(&self, x: &IntMatrix, y: &IntMatrix, k: u32) -> IntMatrix {
        let f = self.format();
        let mut z = vec![0u64; f.n * f.p];
        for t in self.terms() {
            let mut xa: u64 = 0;
            for (e, &v) in t.a.entries().iter().zip(x.entries()) {
                xa = xa.wrapping_add((*e as u64).wrapping_mul(v as u64));
            }
            let mut yb: u64 = 0;
            for (e, &v) in t.b.entries().iter().zip(y.entries()) {
                yb = yb.wrapping_add((*e as u64).wrapping_mul(v as u64));
            }
            let m_l = xa.wrapping_mul(yb);
            for kk in 0..f.p {
                for i in 0..f.n {
                    let c = t.c.get(kk, i) as u64;
                    z[i * f.p + kk] = z[i * f.p + kk].wrapping_add(c.wrapping_mul(m_l));
                }
            }
        }
        let mut out = IntMatrix::zero(f.n, f.p);
        for (idx, v) in z.into_iter().enumerate() {
            out.entries_mut()[idx] = balanced_mod2k(v as i64, k);
        }
        out
    }
}
