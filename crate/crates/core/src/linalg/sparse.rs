use crate::error::{Error, Result};
use crate::exec::Execution;

use super::banded::BandedMatrix;
use super::dense::DenseMatrix;

/// Square matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within each row. Products sum each
/// row left to right, so results are bit-identical regardless of how rows are
/// scheduled across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        Self {
            dim,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.dim && col < self.dim, "triplet ({row}, {col}) out of bounds");
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> SparseMatrix {
        // stable sort keeps insertion order among duplicates, so sums are reproducible
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; self.dim + 1];
        let mut col_indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.dim {
            row_offsets[i + 1] += row_offsets[i];
        }
        SparseMatrix {
            dim: self.dim,
            row_offsets,
            col_indices,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn from_csr(dim: usize, row_offsets: Vec<usize>, col_indices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if row_offsets.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                actual: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() || row_offsets[dim] != values.len() || row_offsets[0] != 0 {
            return Err(Error::InvalidGrid("inconsistent CSR arrays".into()));
        }
        for i in 0..dim {
            if row_offsets[i] > row_offsets[i + 1] {
                return Err(Error::InvalidGrid(format!("row offsets decrease at row {i}")));
            }
            let cols = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= dim) {
                return Err(Error::InvalidGrid(format!(
                    "row {i} has unsorted or out-of-range columns"
                )));
            }
        }
        Ok(Self {
            dim,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_offsets: (0..=dim).collect(),
            col_indices: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_offsets: vec![0; dim + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let n = a.dim();
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            for j in 0..n {
                let v = a.get(i, j);
                if v != 0.0 {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(columns, values)` of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut s = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            s += v * x[c];
        }
        s
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `A x` with the default execution policy.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spmv_with(x, Execution::default())
    }

    pub fn spmv_with(&self, x: &[f64], exec: Execution) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut y = vec![0.0; self.dim];
        self.spmv_into(x, &mut y, exec);
        Ok(y)
    }

    /// Writes `A x` into `y`; lengths must already match.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64], exec: Execution) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        #[cfg(feature = "parallel")]
        if exec.is_parallel() && self.dim >= 4096 {
            use rayon::prelude::*;
            y.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
                let base = c * 1024;
                for (k, yi) in chunk.iter_mut().enumerate() {
                    *yi = self.row_dot(base + k, x);
                }
            });
            return;
        }
        let _ = exec;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
    }

    /// `(lower, upper)` bandwidths of the sparsity pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for i in 0..self.dim {
            let (cols, _) = self.row(i);
            if let (Some(&first), Some(&last)) = (cols.first(), cols.last()) {
                lower = lower.max(i.saturating_sub(first));
                upper = upper.max(last.saturating_sub(i));
            }
        }
        (lower, upper)
    }

    /// Band copy of `A - shift · diag(mass)`.
    pub fn to_banded_shifted(&self, mass: &[f64], shift: f64) -> Result<BandedMatrix> {
        self.check_len(mass)?;
        let (lower, upper) = self.bandwidths();
        let mut b = BandedMatrix::zeros(self.dim, lower, upper)?;
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                b.set(i, c, v);
            }
            if shift != 0.0 {
                b.add(i, i, -shift * mass[i]);
            }
        }
        Ok(b)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(i, c, v);
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::with_capacity(self.dim, self.nnz());
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                b.push(c, i, v);
            }
        }
        b.build()
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, i)).abs());
            }
        }
        worst
    }

    /// `‖D^{-1/2} A D^{-1/2}‖∞` for a positive diagonal `d`.
    pub fn scaled_norm_inf(&self, d: &[f64]) -> f64 {
        (0..self.dim)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .map(|(&c, &v)| v.abs() / (d[i] * d[c]).sqrt())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}
