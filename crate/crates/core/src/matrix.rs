//! Dense matrices over `F_p`.
//!
//! Every structure map, morphism component and boundary operator in the crate
//! is a [`Matrix`]. Shapes with a zero dimension are legal and common: the
//! value of a module below its grid is the zero space.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Fp;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub rref: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors of (possibly unreduced) integers.
    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "ragged matrix rows",
            });
        }
        let data = rows.iter().flatten().map(|&x| field.reduce(x)).collect();
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a `rows × cols` matrix from row-major residues.
    pub fn from_vec(field: Fp, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entry count",
            });
        }
        let p = field.p();
        Ok(Matrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|x| x % p).collect(),
        })
    }

    pub fn from_fn(field: Fp, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % field.p());
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Column matrix from a vector of residues.
    pub fn column(field: Fp, v: &[u32]) -> Self {
        Self::from_fn(field, v.len(), 1, |i, _| v[i])
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p();
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self · rhs`. Panics on a shape mismatch.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} · {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let p = self.field.p() as u64;
        let mut out = vec![0u64; self.rows * rhs.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o = (*o + a * b as u64) % p;
                }
            }
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: rhs.cols,
            data: out.into_iter().map(|x| x as u32).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
            });
        }
        Ok(self.mul(rhs))
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self += c · rhs`.
    pub fn add_scaled(&mut self, rhs: &Matrix, c: u32) {
        assert_eq!(self.shape(), rhs.shape(), "matrix axpy shape mismatch");
        if c == 0 {
            return;
        }
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = f.add(*a, f.mul(b, c));
        }
    }

    pub fn pow(&self, mut e: usize) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        Matrix::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                rhs.get(i, j - self.cols)
            }
        })
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal sum `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &Matrix) -> Matrix {
        Matrix::from_fn(self.field, self.rows + rhs.rows, self.cols + rhs.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j),
                (false, false) => rhs.get(i - self.rows, j - self.cols),
                _ => 0,
            }
        })
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j))
    }

    /// Row-reduces to reduced row echelon form.
    pub fn reduce(&self) -> Reduced {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        Reduced {
            rank: pivots.len(),
            rref: m,
            pivots,
        }
    }

    /// In-place RREF restricted to pivots among the first `pivot_cols`
    /// columns. Returns the pivot columns.
    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]);
            if inv != 1 {
                for j in c..cols {
                    self.data[r * cols + j] = f.mul(self.data[r * cols + j], inv);
                }
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (prow, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u32]| {
                let factor = row[c];
                if factor != 0 {
                    let neg = f.neg(factor);
                    for j in c..cols {
                        if prow[j] != 0 {
                            row[j] = f.add(row[j], f.mul(neg, prow[j]));
                        }
                    }
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.reduce().rank
    }

    /// Columns spanning the null space: `self · k = 0`, `cols − rank` of them.
    pub fn kernel_basis(&self) -> Matrix {
        let red = self.reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !red.pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, 1);
            for (r, &pc) in red.pivots.iter().enumerate() {
                let v = red.rref.get(r, fc);
                if v != 0 {
                    k.data[pc * free.len() + j] = self.field.neg(v);
                }
            }
        }
        k
    }

    /// A basis of the column space, taken from the pivot columns of `self`.
    pub fn column_basis(&self) -> Matrix {
        let red = self.reduce();
        self.select_cols(&red.pivots)
    }

    /// Some `x` with `self · x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch { context: "solve" });
        }
        let mut aug = self.hstack(b);
        let pivots = aug.rref_in_place(self.cols);
        let rank = pivots.len();
        // inconsistent iff a zero row of the coefficient block has a nonzero rhs
        for i in rank..aug.rows {
            if (self.cols..aug.cols).any(|j| aug.get(i, j) != 0) {
                return Ok(None);
            }
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, aug.get(r, self.cols + j));
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Matrix::identity(self.field, n));
        let pivots = aug.rref_in_place(n);
        if pivots.len() != n {
            return None;
        }
        Some(Matrix::from_fn(self.field, n, n, |i, j| aug.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Columns `C` such that `[self | C]` is invertible, assuming the columns
    /// of `self` are independent.
    pub fn complement_basis(&self) -> Matrix {
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n));
        let red = aug.reduce();
        let extra: Vec<usize> = red.pivots.iter().copied().filter(|&c| c >= self.cols).collect();
        aug.select_cols(&extra)
    }
}
