//! Row-major dense matrices.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Applies `f` elementwise into a new matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// `self += scale * other`, elementwise.
    pub fn add_scaled(&mut self, other: &Matrix, scale: f64) {
        assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Row `r` of the output is row `idx[r]` of `a`.
pub fn gather_rows(a: &Matrix, idx: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(idx.len(), a.cols());
    for (r, &src) in idx.iter().enumerate() {
        out.row_mut(r).copy_from_slice(a.row(src));
    }
    out
}

/// Horizontal concatenation of two matrices with equal row counts.
pub fn concat_cols(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows(), b.rows(), "concat rows");
    let mut out = Matrix::zeros(a.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        let row = out.row_mut(i);
        row[..a.cols()].copy_from_slice(a.row(i));
        row[a.cols()..].copy_from_slice(b.row(i));
    }
    out
}

/// Adds row `r` of `a` into output row `dest[r]`.
///
/// Within each destination row, every column's addends are summed in
/// ascending value order (f64 total order). Floating-point addition is not
/// associative, so a fixed positional order would break bit-level
/// permutation equivariance; sorting by value makes the sum a function of
/// the addend multiset alone.
pub fn scatter_sum_rows(a: &Matrix, dest: &[usize], out_rows: usize) -> Matrix {
    assert_eq!(dest.len(), a.rows(), "one destination per source row");
    assert!(dest.iter().all(|&d| d < out_rows), "destination in range");
    let cols = a.cols();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); out_rows];
    for (r, &d) in dest.iter().enumerate() {
        groups[d].push(r);
    }
    let mut out = Matrix::zeros(out_rows, cols);
    let mut buf: Vec<f64> = Vec::new();
    for (d, group) in groups.iter().enumerate() {
        match group.len() {
            0 => {}
            1 => out.row_mut(d).copy_from_slice(a.row(group[0])),
            _ => {
                for col in 0..cols {
                    buf.clear();
                    buf.extend(group.iter().map(|&r| a.get(r, col)));
                    buf.sort_by(|x, y| x.total_cmp(y));
                    out.set(d, col, buf.iter().fold(0.0, |acc, &x| acc + x));
                }
            }
        }
    }
    out
}

/// `A (r×k) · B (k×c)`, i-k-j loop order so the inner loop runs over
/// contiguous rows of both `B` and the output.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.rows, "matmul inner dimensions");
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let a_row = a.row(i);
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in a_row.iter().enumerate() {
            let b_row = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// `A (r×k) · Bᵀ` for `B (c×k)`: rows of the output are dot products of rows.
pub fn matmul_nt(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.cols, "matmul_nt inner dimensions");
    let mut out = Matrix::zeros(a.rows, b.rows);
    for i in 0..a.rows {
        let a_row = a.row(i);
        for j in 0..b.rows {
            let b_row = b.row(j);
            let dot: f64 = a_row.iter().zip(b_row).map(|(&x, &y)| x * y).sum();
            out.data[i * b.rows + j] = dot;
        }
    }
    out
}

/// `Aᵀ · B` for `A (r×k)`, `B (r×c)`; accumulates row outer products.
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows, b.rows, "matmul_tn inner dimensions");
    let mut out = Matrix::zeros(a.cols, b.cols);
    for i in 0..a.rows {
        let a_row = a.row(i);
        let b_row = b.row(i);
        for (k, &aik) in a_row.iter().enumerate() {
            let out_row = &mut out.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bij) in out_row.iter_mut().zip(b_row) {
                *o += aik * bij;
            }
        }
    }
    out
}
