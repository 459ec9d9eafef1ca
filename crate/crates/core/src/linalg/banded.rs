use crate::error::{Error, Result};

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Storage is row-major; row `i` keeps columns `i - lower ..= i + upper + lower`
/// so the factorisation has room for the fill produced by row interchanges.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(dim: usize, lower: usize, upper: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("band matrix dimension must be positive".into()));
        }
        if (lower >= dim || upper >= dim) && dim > 1 {
            return Err(Error::InvalidGrid(format!(
                "bandwidths ({lower}, {upper}) must be smaller than dimension {dim}"
            )));
        }
        let width = 2 * lower + upper + 1;
        Ok(Self {
            dim,
            lower,
            upper,
            width,
            data: vec![0.0; dim * width],
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, 0, 0).expect("positive dimension");
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<f64>], lower: usize, upper: usize) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n, lower, upper)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    if !m.in_band(i, j) {
                        return Err(Error::InvalidGrid(format!("entry ({i}, {j}) outside band")));
                    }
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Sets an in-band entry. Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.slot(i, j);
        self.data[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect())
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)].abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// LU factorisation with partial pivoting restricted to the band.
    pub fn factor(&self) -> Result<BandedLu> {
        let n = self.dim;
        let kl = self.lower;
        let ku = self.upper;
        let mut lu = self.clone();
        let mut pivots = vec![0usize; n];
        let anorm = self.norm_inf();
        let threshold = f64::EPSILON * anorm;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.slot(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if best <= threshold || best == 0.0 {
                return Err(Error::SingularPivot {
                    index: k,
                    magnitude: best,
                });
            }
            if p != k {
                for j in k..=last_col {
                    let a = lu.slot(k, j);
                    let b = lu.slot(p, j);
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.slot(k, k)];
            for i in k + 1..=last_row {
                let sik = lu.slot(i, k);
                let factor = lu.data[sik] / pivot;
                lu.data[sik] = factor;
                if factor != 0.0 {
                    let base_k = lu.slot(k, k);
                    let base_i = lu.slot(i, k);
                    for off in 1..=(last_col - k) {
                        let v = lu.data[base_k + off];
                        lu.data[base_i + off] -= factor * v;
                    }
                }
            }
        }
        Ok(BandedLu { lu, pivots })
    }
}

/// Packed LU factors of a [`BandedMatrix`].
#[derive(Clone, Debug)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.dim
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.lu.dim;
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        let kl = self.lu.lower;
        let ku = self.lu.upper;
        let m = &self.lu;
        // forward: apply interchanges and unit-lower elimination in step order
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    x[i] -= m.data[m.slot(i, k)] * xk;
                }
            }
        }
        // backward: U has bandwidth ku + kl after pivoting
        for i in (0..n).rev() {
            let base = m.slot(i, i);
            let hi = (i + ku + kl).min(n - 1);
            let mut s = x[i];
            for off in 1..=(hi - i) {
                s -= m.data[base + off] * x[i + off];
            }
            x[i] = s / m.data[base];
        }
        Ok(())
    }
}

/// Factorises `a` and solves `a x = b`.
pub fn band_factor_solve(a: &BandedMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        });
    }
    a.factor()?.solve(b)
}
