//! Compressed sparse row storage for the instance matrices.
//!
//! Matrices are kept in canonical form: entries sorted by (row, col), duplicates
//! summed and exact zeros dropped. Two canonical matrices with the same entries
//! compare equal.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds a canonical matrix from triplets. Returns the matrix and the
    /// number of duplicate positions that were merged.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<(Self, usize)> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidModel(format!(
                    "entry ({r}, {c}) outside {nrows}x{ncols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite entry at ({r}, {c})")));
            }
            entries.push((r, c, v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut duplicates = 0;
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => {
                    last.2 += v;
                    duplicates += 1;
                }
                _ => merged.push((r, c, v)),
            }
        }

        let mut row_ptr = vec![0; nrows + 1];
        let mut cols = Vec::with_capacity(merged.len());
        let mut vals = Vec::with_capacity(merged.len());
        for (r, c, v) in merged {
            if v == 0.0 {
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok((
            CsrMatrix {
                nrows,
                ncols,
                row_ptr,
                cols,
                vals,
            },
            duplicates,
        ))
    }

    /// Convenience constructor from dense rows; panics on ragged input.
    pub fn from_dense(rows: &[Vec<f64>], ncols: usize) -> Self {
        let triplets = rows.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), ncols, "ragged dense row {r}");
            row.iter().enumerate().map(move |(c, &v)| (r, c, v))
        });
        Self::from_triplets(rows.len(), ncols, triplets)
            .expect("dense rows are in range")
            .0
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `yᵀ A`
    pub fn transpose_mul(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            for (c, v) in self.row(r) {
                out[c] += yr * v;
            }
        }
        out
    }

    /// Weighted sum of equally shaped matrices.
    pub fn weighted_sum<'a>(
        nrows: usize,
        ncols: usize,
        terms: impl IntoIterator<Item = (f64, &'a CsrMatrix)>,
    ) -> Result<Self> {
        let mut triplets = Vec::new();
        for (w, m) in terms {
            if m.nrows != nrows || m.ncols != ncols {
                return Err(Error::InvalidModel(format!(
                    "shape {}x{} does not match {nrows}x{ncols}",
                    m.nrows, m.ncols
                )));
            }
            triplets.extend(m.triplets().map(|(r, c, v)| (r, c, w * v)));
        }
        Ok(Self::from_triplets(nrows, ncols, triplets)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let (m, dup) =
            CsrMatrix::from_triplets(2, 2, vec![(0, 1, 2.0), (1, 0, 1.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(dup, 1);
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn cancelling_entries_vanish() {
        let (m, _) = CsrMatrix::from_triplets(1, 1, vec![(0, 0, 2.0), (0, 0, -2.0)]).unwrap();
        assert_eq!(m, CsrMatrix::zeros(1, 1));
    }

    #[test]
    fn products() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, -1.0]], 2);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![3.0, -1.0]);
        assert_eq!(m.transpose_mul(&[1.0, 1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(CsrMatrix::from_triplets(1, 1, vec![(1, 0, 1.0)]).is_err());
    }
}
