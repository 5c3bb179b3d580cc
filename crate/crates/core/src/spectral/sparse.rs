//! Symmetric sparse matrices in compressed-row form.

use rayon::prelude::*;

const ROW_CHUNK: usize = 512;

/// Symmetric matrix with both triangles stored, rows sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SymCsr {
    /// Builds from upper-triangle entries `(u, v, x)`, `u <= v`; each pair
    /// must appear once. Explicit zeros are dropped.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (u, v, x) in pairs {
            if x != 0.0 {
                rows[u].push((v as u32, x));
                if u != v {
                    rows[v].push((u as u32, x));
                }
            }
        }
        Self::from_rows(rows)
    }

    fn from_rows(mut rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut indptr = Vec::with_capacity(n + 1);
        indptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            for &(c, x) in row.iter() {
                indices.push(c);
                values.push(x);
            }
            indptr.push(indices.len());
        }
        Self { n, indptr, indices, values }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, indptr: vec![0; n + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored non-zeros, counting both triangles.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        idx.binary_search(&(c as u32)).map_or(0.0, |i| val[i])
    }

    /// `y = A x`. Rows are split across threads; each row sums sequentially,
    /// so the result does not depend on the thread count.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(chunk, out)| {
            let base = chunk * ROW_CHUNK;
            for (offset, slot) in out.iter_mut().enumerate() {
                let (idx, val) = self.row(base + offset);
                *slot = idx.iter().zip(val).map(|(&c, &a)| a * x[c as usize]).sum();
            }
        });
    }

    /// Principal submatrix on the sorted index set `keep`.
    pub fn principal(&self, keep: &[usize]) -> Self {
        let mut position = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            position[old] = new as u32;
        }
        let rows = keep
            .iter()
            .map(|&old| {
                let (idx, val) = self.row(old);
                idx.iter()
                    .zip(val)
                    .filter(|(&c, _)| position[c as usize] != u32::MAX)
                    .map(|(&c, &a)| (position[c as usize], a))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    /// Dense row-major copy, for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (r, row) in out.iter_mut().enumerate() {
            let (idx, val) = self.row(r);
            for (&c, &a) in idx.iter().zip(val) {
                row[c as usize] = a;
            }
        }
        out
    }
}
