use std::hash::Hash;

/// Structural operations shared by the two coefficient carriers.
///
/// Everything a scheme transformation needs that does not depend on ring
/// arithmetic: dimensions, zero tests, transposition, block embedding and
/// cropping. Ring arithmetic stays in the concrete types.
pub trait Mat: Clone + Eq + Ord + Hash {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    fn zero(rows: usize, cols: usize) -> Self;
    fn is_zero(&self) -> bool;

    /// Entry as a plain integer (0/1 for the GF(2) carrier).
    fn entry(&self, r: usize, c: usize) -> i64;

    fn transposed(&self) -> Self;

    /// Copy of `self` placed at (`row_off`, `col_off`) inside a zero
    /// `rows` x `cols` matrix.
    fn embedded(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> Self;

    /// Submatrix keeping the listed rows and columns, in the listed order.
    fn cropped(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self;
}
