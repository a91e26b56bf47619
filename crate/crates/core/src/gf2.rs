//! Dense GF(2) linear algebra on bit-packed rows.
//!
//! Shared backend for symplectic row reduction, span membership and the
//! destabilizer solve. Rows are little-endian bit vectors in 64-bit words.

pub type Word = u64;
pub const WORD_BITS: usize = 64;

pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<Vec<Word>>,
}

impl BitMatrix {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[cfg(test)]
    pub fn push_zero_row(&mut self) {
        self.rows.push(vec![0; words_for(self.ncols)]);
    }

    pub fn push_row(&mut self, row: Vec<Word>) {
        debug_assert_eq!(row.len(), words_for(self.ncols));
        self.rows.push(row);
    }

    pub fn row(&self, r: usize) -> &[Word] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(c < self.ncols);
        self.rows[r][c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(c < self.ncols);
        let mask = 1 << (c % WORD_BITS);
        if v {
            self.rows[r][c / WORD_BITS] |= mask;
        } else {
            self.rows[r][c / WORD_BITS] &= !mask;
        }
    }

    /// dst ^= src, for distinct rows.
    pub fn xor_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let (a, b) = if src < dst {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        for (w, s) in b.iter_mut().zip(a.iter()) {
            *w ^= s;
        }
    }

    fn row_is_zero(&self, r: usize) -> bool {
        self.rows[r].iter().all(|&w| w == 0)
    }

    /// Reduced row echelon form restricted to the first `pivot_cols` columns.
    ///
    /// Rows are permuted so pivot rows come first; returns the pivot column
    /// of each. Columns at `pivot_cols` and beyond are carried along as an
    /// augmented block but never chosen as pivots.
    pub fn rref_within(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..pivot_cols.min(self.ncols) {
            let Some(pivot) = (rank..self.nrows()).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.rows.swap(rank, pivot);
            for r in 0..self.nrows() {
                if r != rank && self.get(r, col) {
                    self.xor_row(rank, r);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    /// Full reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_within(self.ncols)
    }

    #[cfg(test)]
    pub fn rank(mut self) -> usize {
        self.rref().len()
    }

    /// Reduce `row` against `self`, which must already be in rref with the
    /// given pivot columns. Returns the remainder.
    pub fn reduce(&self, mut row: Vec<Word>, pivots: &[usize]) -> Vec<Word> {
        for (r, &col) in pivots.iter().enumerate() {
            if row[col / WORD_BITS] >> (col % WORD_BITS) & 1 == 1 {
                for (w, s) in row.iter_mut().zip(self.rows[r].iter()) {
                    *w ^= s;
                }
            }
        }
        row
    }
}

/// Solve `A v = b` over GF(2) for every right-hand side column in `rhs`,
/// taking free variables as zero. `rhs[r]` holds the right-hand side bits of
/// equation row `r`, one bit per system. Returns one solution per system, or
/// `None` if any system is inconsistent.
pub fn solve(a: &BitMatrix, rhs: &[Word], nsys: usize) -> Option<Vec<Vec<Word>>> {
    assert!(nsys <= WORD_BITS, "at most {WORD_BITS} simultaneous systems");
    assert_eq!(rhs.len(), a.nrows());
    let ncols = a.ncols();
    let mut aug = BitMatrix::new(ncols + nsys);
    for (r, row) in a.rows.iter().enumerate() {
        let mut w = row.clone();
        w.resize(words_for(ncols + nsys), 0);
        aug.push_row(w);
        for s in 0..nsys {
            if rhs[r] >> s & 1 == 1 {
                aug.set(r, ncols + s, true);
            }
        }
    }
    let pivots = aug.rref_within(ncols);
    // A row with a zero system part but a nonzero right-hand side has no solution.
    for r in pivots.len()..aug.nrows() {
        if !aug.row_is_zero(r) {
            return None;
        }
    }
    let mut solutions = vec![vec![0; words_for(ncols)]; nsys];
    for (r, &col) in pivots.iter().enumerate() {
        for (s, sol) in solutions.iter_mut().enumerate() {
            if aug.get(r, ncols + s) {
                sol[col / WORD_BITS] |= 1 << (col % WORD_BITS);
            }
        }
    }
    Some(solutions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_bits(ncols: usize, rows: &[&[u8]]) -> BitMatrix {
        let mut m = BitMatrix::new(ncols);
        for (r, bits) in rows.iter().enumerate() {
            m.push_zero_row();
            for (c, &b) in bits.iter().enumerate() {
                m.set(r, c, b == 1);
            }
        }
        m
    }

    #[test]
    fn rref_rank() {
        let m = from_bits(3, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let m = from_bits(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn reduce_detects_membership() {
        let mut m = from_bits(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let pivots = m.rref();
        let member = m.reduce(vec![0b101], &pivots);
        assert!(member.iter().all(|&w| w == 0));
        let outside = m.reduce(vec![0b001], &pivots);
        assert!(outside.iter().any(|&w| w != 0));
    }

    #[test]
    fn solve_simple_system() {
        // x0 + x1 = 1, x1 + x2 = 0  ->  free x2 = 0 gives (1, 0, 0).
        let a = from_bits(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let sol = solve(&a, &[0b1, 0b0], 1).unwrap();
        assert_eq!(sol[0], vec![0b001]);
        // Inconsistent: duplicate equation with conflicting rhs.
        let a = from_bits(2, &[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[0b1, 0b0], 1).is_none());
    }

    #[test]
    fn solve_multiple_rhs() {
        let a = from_bits(2, &[&[1, 0], &[1, 1]]);
        let sol = solve(&a, &[0b01, 0b10], 2).unwrap();
        // System 0: x0 = 1, x0 + x1 = 0 -> (1, 1).
        assert_eq!(sol[0], vec![0b11]);
        // System 1: x0 = 0, x0 + x1 = 1 -> (0, 1).
        assert_eq!(sol[1], vec![0b10]);
    }
}
