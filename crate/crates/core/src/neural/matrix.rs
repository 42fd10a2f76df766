use alloc::vec::Vec;

use crate::error::{check_len, invalid, Result};

/// Dense row-major matrix; rows are batch examples.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix", "dimensions must be positive"));
        }
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Index of the largest entry of each row (first on ties).
    pub fn argmax_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let mut best = 0;
                for (i, &v) in row.iter().enumerate().skip(1) {
                    if v > row[best] {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }
}

// The three products needed by a dense layer. All operands are row-major;
// transposes are expressed through strides.

/// `out (b×o) = x (b×i) · wᵀ`, where `w` is `o×i`.
pub(crate) fn matmul_xwt(x: &Matrix, w: &[f64], out_cols: usize, out: &mut Matrix) {
    let (b, i, o) = (x.rows, x.cols, out_cols);
    assert_eq!(w.len(), o * i);
    assert!(out.rows == b && out.cols == o);
    // SAFETY: dimensions and strides are checked against the slice lengths above.
    unsafe {
        matrixmultiply::dgemm(
            b,
            i,
            o,
            1.0,
            x.data.as_ptr(),
            i as isize,
            1,
            w.as_ptr(),
            1,
            i as isize,
            0.0,
            out.data.as_mut_ptr(),
            o as isize,
            1,
        );
    }
}

/// `dw (o×i) = dzᵀ · x`, where `dz` is `b×o` and `x` is `b×i`.
pub(crate) fn matmul_dztx(dz: &Matrix, x: &Matrix, dw: &mut [f64]) {
    let (b, o, i) = (dz.rows, dz.cols, x.cols);
    assert_eq!(x.rows, b);
    assert_eq!(dw.len(), o * i);
    // SAFETY: dimensions and strides are checked against the slice lengths above.
    unsafe {
        matrixmultiply::dgemm(
            o,
            b,
            i,
            1.0,
            dz.data.as_ptr(),
            1,
            o as isize,
            x.data.as_ptr(),
            i as isize,
            1,
            0.0,
            dw.as_mut_ptr(),
            i as isize,
            1,
        );
    }
}

/// `dx (b×i) = dz (b×o) · w (o×i)`.
pub(crate) fn matmul_dzw(dz: &Matrix, w: &[f64], in_cols: usize, dx: &mut Matrix) {
    let (b, o, i) = (dz.rows, dz.cols, in_cols);
    assert_eq!(w.len(), o * i);
    assert!(dx.rows == b && dx.cols == i);
    // SAFETY: dimensions and strides are checked against the slice lengths above.
    unsafe {
        matrixmultiply::dgemm(
            b,
            o,
            i,
            1.0,
            dz.data.as_ptr(),
            o as isize,
            1,
            w.as_ptr(),
            i as isize,
            1,
            0.0,
            dx.data.as_mut_ptr(),
            i as isize,
            1,
        );
    }
}
