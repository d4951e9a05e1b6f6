//! Row-per-vertex embedding matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// `|V| x k` real matrix stored row-major; row `v` is the representation of
/// vertex `v`. Appending a row is amortized O(k).
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    data: Vec<f64>,
    k: usize,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, k: usize) -> Self {
        EmbeddingMatrix {
            data: vec![0.0; rows * k],
            k,
        }
    }

    pub fn from_rows(k: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(EmbeddingMatrix { data, k })
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let k = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns differ in length".into()));
        }
        let mut m = EmbeddingMatrix::zeros(rows, k);
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.data[i * k + j] = x;
            }
        }
        Ok(m)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let (rows, k) = m.shape();
        let mut data = Vec::with_capacity(rows * k);
        for i in 0..rows {
            data.extend(m.row(i).iter().copied());
        }
        EmbeddingMatrix { data, k }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.k, &self.data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.k).unwrap_or(0)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, v: VertexId) -> &[f64] {
        &self.data[v.0 * self.k..(v.0 + 1) * self.k]
    }

    #[inline]
    pub fn row_mut(&mut self, v: VertexId) -> &mut [f64] {
        &mut self.data[v.0 * self.k..(v.0 + 1) * self.k]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k.max(1))
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.k, "row length must equal embedding dimension");
        self.data.extend_from_slice(row);
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Gram matrix `F^T F` as a dense `k x k` array (row-major).
    pub fn gram(&self) -> Vec<f64> {
        let k = self.k;
        let mut g = vec![0.0; k * k];
        for row in self.iter_rows() {
            for a in 0..k {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..k {
                    g[a * k + b] += ra * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                g[a * k + b] = g[b * k + a];
            }
        }
        g
    }

    pub fn row_norm(&self, v: VertexId) -> f64 {
        self.row(v).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Replaces the columns by an orthonormal basis of their span (thin QR),
    /// fixing signs so that the triangular factor has a non-negative diagonal.
    pub fn reorthonormalize(&mut self) {
        if self.rows() < self.k || self.k == 0 {
            return;
        }
        let qr = self.to_dmatrix().qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..self.k {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        *self = EmbeddingMatrix::from_dmatrix(&q);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns_agree() {
        let m = EmbeddingMatrix::from_columns(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.row(VertexId(1)), &[2.0, 5.0]);
        assert_eq!(m.column(1), vec![4.0, 5.0, 6.0]);
        assert_eq!(EmbeddingMatrix::from_dmatrix(&m.to_dmatrix()), m);
    }

    #[test]
    fn gram_of_scaled_identity() {
        let m = EmbeddingMatrix::from_rows(2, &[vec![2.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]])
            .unwrap();
        assert_eq!(m.gram(), vec![4.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn reorthonormalize_restores_identity_gram() {
        let mut m = EmbeddingMatrix::from_rows(
            2,
            &[vec![1.0, 0.1], vec![0.2, 1.0], vec![0.3, -0.4], vec![0.0, 0.5]],
        )
        .unwrap();
        m.reorthonormalize();
        let g = m.gram();
        for (i, x) in g.iter().enumerate() {
            let target = if i % 3 == 0 { 1.0 } else { 0.0 };
            assert!((x - target).abs() < 1e-12);
        }
    }
}
