//! Smith normal form over the integers.
//!
//! Elimination runs in overflow-checked `i64` and restarts in big integers
//! if any intermediate entry leaves that range. Pivoting always picks the
//! smallest nonzero absolute value in the active block. No modular
//! shortcuts are taken.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnfError {
    #[error("invariant factor {0} does not fit in 64 bits")]
    Overflow(BigUint),
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            m.data[r * cols..(r + 1) * cols].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Entry type for elimination. `sub_mul` returns `None` on overflow.
trait Entry: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn magnitude_lt(&self, other: &Self) -> bool;
    fn is_unit(&self) -> bool;
    fn floor_div(&self, d: &Self) -> Self;
    fn divides(&self, n: &Self) -> bool;
    /// `self - q * s`
    fn sub_mul(&self, q: &Self, s: &Self) -> Option<Self>;
    fn neg_one() -> Self;
}

impl Entry for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn magnitude_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn is_unit(&self) -> bool {
        self.unsigned_abs() == 1
    }
    fn floor_div(&self, d: &Self) -> Self {
        self.div_euclid(*d)
    }
    fn divides(&self, n: &Self) -> bool {
        n % self == 0
    }
    fn sub_mul(&self, q: &Self, s: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*s)?)
    }
    fn neg_one() -> Self {
        -1
    }
}

impl Entry for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn is_unit(&self) -> bool {
        self.magnitude() == &BigUint::from(1u32)
    }
    fn floor_div(&self, d: &Self) -> Self {
        self.div_floor(d)
    }
    fn divides(&self, n: &Self) -> bool {
        n.is_multiple_of(self)
    }
    fn sub_mul(&self, q: &Self, s: &Self) -> Option<Self> {
        Some(self - q * s)
    }
    fn neg_one() -> Self {
        BigInt::from(-1)
    }
}

struct Work<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Entry> Work<T> {
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src], from column `from` onward.
    fn row_axpy(&mut self, dst: usize, src: usize, q: &T, from: usize) -> Option<()> {
        for c in from..self.cols {
            let s = self.at(src, c);
            if !s.is_zero() {
                let v = self.at(dst, c).sub_mul(q, s)?;
                self.data[dst * self.cols + c] = v;
            }
        }
        Some(())
    }

    /// col[dst] -= q * col[src], from row `from` onward.
    fn col_axpy(&mut self, dst: usize, src: usize, q: &T, from: usize) -> Option<()> {
        for r in from..self.rows {
            let s = self.at(r, src);
            if !s.is_zero() {
                let v = self.at(r, dst).sub_mul(q, s)?;
                self.data[r * self.cols + dst] = v;
            }
        }
        Some(())
    }

    fn smallest_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for r in t..self.rows {
            for c in t..self.cols {
                let v = self.at(r, c);
                if !v.is_zero() && best.is_none_or(|(br, bc)| v.magnitude_lt(self.at(br, bc))) {
                    best = Some((r, c));
                    if v.is_unit() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        for r in t + 1..self.rows {
            let v = self.at(r, t);
            if !v.is_zero() && v.magnitude_lt(self.at(best.0, best.1)) {
                best = (r, t);
            }
        }
        for c in t + 1..self.cols {
            let v = self.at(t, c);
            if !v.is_zero() && v.magnitude_lt(self.at(best.0, best.1)) {
                best = (t, c);
            }
        }
        best
    }

    fn find_non_multiple(&self, t: usize) -> Option<usize> {
        let p = self.at(t, t);
        (t + 1..self.rows).find(|&r| (t + 1..self.cols).any(|c| !p.divides(self.at(r, c))))
    }

    /// Diagonal of the Smith form, or `None` on overflow.
    fn diagonalize(mut self) -> Option<Vec<T>> {
        let mut diag = Vec::new();
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((pr, pc)) = self.smallest_entry(t) else {
                break;
            };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                let p = self.at(t, t).clone();
                let mut dirty = false;
                for r in t + 1..self.rows {
                    if !self.at(r, t).is_zero() {
                        let q = self.at(r, t).floor_div(&p);
                        self.row_axpy(r, t, &q, t)?;
                        dirty |= !self.at(r, t).is_zero();
                    }
                }
                for c in t + 1..self.cols {
                    if !self.at(t, c).is_zero() {
                        let q = self.at(t, c).floor_div(&p);
                        self.col_axpy(c, t, &q, t)?;
                        dirty |= !self.at(t, c).is_zero();
                    }
                }
                if dirty {
                    // a remainder smaller than the pivot survived; re-pivot on it
                    let (pr, pc) = self.smallest_in_cross(t);
                    self.swap_rows(t, pr);
                    self.swap_cols(t, pc);
                    continue;
                }
                // pivot must divide the rest of the block
                match self.find_non_multiple(t) {
                    Some(r) => self.row_axpy(t, r, &T::neg_one(), t)?,
                    None => break,
                }
            }
            diag.push(self.at(t, t).clone());
            t += 1;
        }
        Some(diag)
    }
}

/// Nonzero diagonal of the Smith normal form, positive and each dividing
/// the next. Its length is the rank.
pub fn invariant_factors_big(matrix: &DenseMatrix) -> Vec<BigUint> {
    let small = Work {
        rows: matrix.rows,
        cols: matrix.cols,
        data: matrix.data.clone(),
    };
    if let Some(diag) = small.diagonalize() {
        return diag
            .into_iter()
            .map(|v| BigUint::from(v.unsigned_abs()))
            .collect();
    }
    let big = Work {
        rows: matrix.rows,
        cols: matrix.cols,
        data: matrix.data.iter().map(|&v| BigInt::from(v)).collect(),
    };
    big.diagonalize()
        .expect("big-integer elimination cannot overflow")
        .into_iter()
        .map(|v| v.abs().to_biguint().expect("absolute value"))
        .collect()
}

/// [`invariant_factors_big`] narrowed to `u64`.
pub fn invariant_factors(matrix: &DenseMatrix) -> Result<Vec<u64>, SnfError> {
    invariant_factors_big(matrix)
        .into_iter()
        .map(|v| v.to_u64().ok_or(SnfError::Overflow(v)))
        .collect()
}

pub fn rank(matrix: &DenseMatrix) -> usize {
    invariant_factors_big(matrix).len()
}
