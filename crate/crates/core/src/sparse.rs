// SPDX-License-Identifier: MIT

//! Compressed sparse row matrices with canonical storage.
//!
//! Exact zeros are never stored and column indices are strictly increasing
//! within each row, so two matrices are equal as values exactly when their
//! shapes and stored triples coincide.

use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Csr {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl fmt::Debug for Csr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Csr({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

fn col_index(c: usize) -> u32 {
    u32::try_from(c).expect("column index exceeds u32 range")
}

impl Csr {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Csr { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zeros(n, n);
        }
        Csr {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).map(col_index).collect(),
            values: vec![alpha; n],
        }
    }

    /// Builds from a row-major dense buffer.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "dense buffer length mismatch");
        let mut b = CsrBuilder::new(cols);
        for r in 0..rows {
            for c in 0..cols {
                b.push(c, data[r * cols + c]);
            }
            b.end_row();
        }
        b.finish()
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let flat: Vec<f64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().copied()
            })
            .collect();
        Self::from_dense(rows.len(), cols, &flat)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[s..e].iter().zip(&self.values[s..e]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (s, e) = (self.indptr[r], self.indptr[r + 1]);
        match self.indices[s..e].binary_search(&col_index(c)) {
            Ok(k) => self.values[s + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                out[r * self.cols + c] = v;
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.to_dense().chunks(self.cols.max(1)).take(self.rows).map(<[f64]>::to_vec).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    /// Product `self * rhs`; terms are accumulated in increasing inner index.
    pub fn matmul(&self, rhs: &Csr) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let n = rhs.cols;
        let mut acc = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut b = CsrBuilder::new(n);
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, v) in rhs.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * v;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                b.push(c, acc[c]);
                acc[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
            b.end_row();
        }
        b.finish()
    }

    pub fn block_diag(blocks: &[&Csr]) -> Self {
        let cols = blocks.iter().map(|m| m.cols).sum();
        let mut b = CsrBuilder::new(cols);
        let mut off = 0;
        for m in blocks {
            for r in 0..m.rows {
                for (c, v) in m.row(r) {
                    b.push(off + c, v);
                }
                b.end_row();
            }
            off += m.cols;
        }
        b.finish()
    }

    pub fn hstack(blocks: &[&Csr]) -> Self {
        let rows = blocks.first().map_or(0, |m| m.rows);
        assert!(blocks.iter().all(|m| m.rows == rows), "hstack row mismatch");
        let cols = blocks.iter().map(|m| m.cols).sum();
        let mut b = CsrBuilder::new(cols);
        for r in 0..rows {
            let mut off = 0;
            for m in blocks {
                for (c, v) in m.row(r) {
                    b.push(off + c, v);
                }
                off += m.cols;
            }
            b.end_row();
        }
        b.finish()
    }

    pub fn vstack(blocks: &[&Csr]) -> Self {
        let cols = blocks.first().map_or(0, |m| m.cols);
        assert!(blocks.iter().all(|m| m.cols == cols), "vstack column mismatch");
        let mut b = CsrBuilder::new(cols);
        for m in blocks {
            for r in 0..m.rows {
                for (c, v) in m.row(r) {
                    b.push(c, v);
                }
                b.end_row();
            }
        }
        b.finish()
    }
}

/// Row-by-row builder; columns within a row must be pushed in increasing order.
pub struct CsrBuilder {
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrBuilder {
    pub fn new(cols: usize) -> Self {
        CsrBuilder { cols, indptr: vec![0], indices: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, c: usize, v: f64) {
        debug_assert!(c < self.cols);
        if v != 0.0 {
            let start = *self.indptr.last().unwrap();
            debug_assert!(self.indices.len() == start || (*self.indices.last().unwrap() as usize) < c);
            self.indices.push(col_index(c));
            self.values.push(v);
        }
    }

    pub fn end_row(&mut self) {
        self.indptr.push(self.indices.len());
    }

    pub fn finish(self) -> Csr {
        Csr {
            rows: self.indptr.len() - 1,
            cols: self.cols,
            indptr: self.indptr,
            indices: self.indices,
            values: self.values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                for t in 0..k {
                    out[i * n + j] += a[i * k + t] * b[t * n + j];
                }
            }
        }
        out
    }

    #[test]
    fn zeros_are_not_stored() {
        let m = Csr::from_dense(2, 2, &[0.0, 1.0, -0.0, 0.0]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.to_dense(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = [1.0, 0.0, 2.0, -1.0, 3.0, 0.0];
        let b = [0.5, 1.0, 0.0, 0.0, 2.0, -4.0, 1.0, 0.0, 0.0, 0.0, 0.0, 7.0];
        let p = Csr::from_dense(2, 3, &a).matmul(&Csr::from_dense(3, 4, &b));
        assert_eq!(p.to_dense(), dense_mul(&a, &b, 2, 3, 4));
    }

    #[test]
    fn cancellation_drops_entry() {
        let a = Csr::from_dense(1, 2, &[1.0, 1.0]);
        let b = Csr::from_dense(2, 1, &[1.0, -1.0]);
        assert_eq!(a.matmul(&b).nnz(), 0);
    }

    #[test]
    fn stacking_shapes() {
        let i = Csr::identity(2);
        let z = Csr::zeros(1, 3);
        assert_eq!(
            Csr::block_diag(&[&i, &z]).to_rows(),
            vec![vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 0.0, 0.0],]
        );
        assert_eq!(Csr::hstack(&[&i, &i]).to_rows(), vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]);
        assert_eq!(Csr::vstack(&[&i, &i]).rows(), 4);
    }
}
