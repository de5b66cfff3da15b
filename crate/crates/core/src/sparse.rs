//! Compressed sparse row matrices with sorted column indices.
//!
//! Column indices within each row are kept sorted so that every traversal
//! (SpMV, SpMM, merges) visits entries in one fixed order, which makes all
//! downstream floating-point reductions reproducible.

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from (row, col, value) triplets. Duplicate coordinates are summed;
    /// entries that sum to exactly zero are kept (callers that need pruning can
    /// filter first). Column order within a row is sorted.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::Parameter(format!(
                    "triplet ({r}, {c}) out of bounds for {nrows}x{ncols} matrix"
                )));
            }
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = row[i].1;
                let mut j = i + 1;
                while j < row.len() && row[j].0 == c {
                    v += row[j].1;
                    j += 1;
                }
                col_idx.push(c);
                values.push(v);
                i = j;
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Sorted (col, value) pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// y = A x
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[i] * x[self.col_idx[i]];
            }
            y[r] = acc;
        }
    }

    /// A · B for dense B, row by row in index order.
    pub fn mul_dense(&self, b: &Array2<f64>) -> Array2<f64> {
        assert_eq!(b.nrows(), self.ncols);
        let d = b.ncols();
        let mut out = Array2::zeros((self.nrows, d));
        for r in 0..self.nrows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[i];
                let src = b.row(self.col_idx[i]);
                let mut dst = out.row_mut(r);
                for j in 0..d {
                    dst[j] += v * src[j];
                }
            }
        }
        out
    }

    /// Aᵀ · B for dense B (used for sketched Gram accumulation).
    pub fn transpose_mul_dense(&self, b: &Array2<f64>) -> Array2<f64> {
        assert_eq!(b.nrows(), self.nrows);
        let d = b.ncols();
        let mut out = Array2::zeros((self.ncols, d));
        for r in 0..self.nrows {
            let src = b.row(r);
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[i];
                let mut dst = out.row_mut(self.col_idx[i]);
                for j in 0..d {
                    dst[j] += v * src[j];
                }
            }
        }
        out
    }

    /// Weighted sum Σ wᵢ·Aᵢ of structurally compatible matrices.
    /// Rows are merged in sorted column order.
    pub fn weighted_sum(mats: &[&CsrMatrix], weights: &[f64]) -> Result<CsrMatrix> {
        if mats.is_empty() || mats.len() != weights.len() {
            return Err(Error::Parameter(
                "weighted_sum needs one weight per matrix".into(),
            ));
        }
        let nrows = mats[0].nrows;
        let ncols = mats[0].ncols;
        for m in mats {
            if m.nrows != nrows || m.ncols != ncols {
                return Err(Error::DimensionMismatch(
                    "weighted_sum over differently shaped matrices".into(),
                ));
            }
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut cursors = vec![0usize; mats.len()];
        for r in 0..nrows {
            for (m, cur) in mats.iter().zip(cursors.iter_mut()) {
                *cur = m.row_ptr[r];
            }
            loop {
                let mut next_col = usize::MAX;
                for (m, &cur) in mats.iter().zip(cursors.iter()) {
                    if cur < m.row_ptr[r + 1] {
                        next_col = next_col.min(m.col_idx[cur]);
                    }
                }
                if next_col == usize::MAX {
                    break;
                }
                let mut acc = 0.0;
                for ((m, cur), &w) in mats.iter().zip(cursors.iter_mut()).zip(weights.iter()) {
                    if *cur < m.row_ptr[r + 1] && m.col_idx[*cur] == next_col {
                        acc += w * m.values[*cur];
                        *cur += 1;
                    }
                }
                col_idx.push(next_col);
                values.push(acc);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Squared Frobenius norm, Σ aᵢⱼ².
    pub fn fro_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.nrows, self.ncols));
        for r in 0..self.nrows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[[r, self.col_idx[i]]] = self.values[i];
            }
        }
        out
    }

    /// Entrywise max |aᵢⱼ − bᵢⱼ| over the union pattern.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m = m.max((v - other.get(r, c)).abs());
            }
            for (c, v) in other.row(r) {
                m = m.max((v - self.get(r, c)).abs());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m =
            CsrMatrix::from_triplets(2, 3, vec![(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5)]).unwrap();
        let row: Vec<_> = m.row(0).collect();
        assert_eq!(row, vec![(0, 2.0), (2, 1.5)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.row(1).count(), 0);
    }

    #[test]
    fn spmv_matches_dense() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let mut y = vec![0.0; 2];
        m.spmv(&[3.0, 4.0], &mut y);
        assert_eq!(y, vec![4.0, 3.0]);
    }

    #[test]
    fn weighted_sum_merges_patterns() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]).unwrap();
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 2.0), (1, 1, 4.0)]).unwrap();
        let s = CsrMatrix::weighted_sum(&[&a, &b], &[0.5, 0.25]).unwrap();
        assert_eq!(s.get(0, 0), 0.5);
        assert_eq!(s.get(0, 1), 0.5);
        assert_eq!(s.get(1, 1), 1.0);
    }

    #[test]
    fn out_of_bounds_triplet_rejected() {
        assert!(CsrMatrix::from_triplets(1, 1, vec![(0, 1, 1.0)]).is_err());
    }
}
