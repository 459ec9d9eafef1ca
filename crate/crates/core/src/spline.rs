//! Cubic splines on uniform grids.
//!
//! Both variants are represented by their nodal slopes and evaluated in
//! Hermite form, which makes the tensor-product construction in
//! [`crate::morse`] a matter of applying the same slope solve along rows and
//! columns.

/// Nodal slopes of the natural cubic spline (`s″ = 0` at both ends).
pub fn natural_slopes(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 2, "spline needs at least two nodes");
    if n == 2 {
        let d = (values[1] - values[0]) / h;
        return vec![d, d];
    }
    // s_{i-1} + 4 s_i + s_{i+1} = 3 (y_{i+1} - y_{i-1}) / h, with
    // 2 s_0 + s_1 = 3 (y_1 - y_0) / h at the ends.
    let mut diag = vec![4.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0;
    diag[n - 1] = 2.0;
    rhs[0] = 3.0 * (values[1] - values[0]) / h;
    rhs[n - 1] = 3.0 * (values[n - 1] - values[n - 2]) / h;
    for i in 1..n - 1 {
        rhs[i] = 3.0 * (values[i + 1] - values[i - 1]) / h;
    }
    solve_unit_offdiag_tridiagonal(&mut diag, &mut rhs);
    rhs
}

/// Nodal slopes of the periodic cubic spline; `values[i]` sits at `i·h` and
/// the period is `values.len()·h`.
pub fn periodic_slopes(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "periodic spline needs at least three nodes");
    let rhs: Vec<f64> = (0..n)
        .map(|i| 3.0 * (values[(i + 1) % n] - values[(i + n - 1) % n]) / h)
        .collect();
    solve_cyclic(&rhs)
}

/// Thomas algorithm for a symmetric tridiagonal matrix with unit off-diagonal.
fn solve_unit_offdiag_tridiagonal(diag: &mut [f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - rhs[i + 1]) / diag[i];
    }
}

/// Solves the circulant system `x_{i-1} + 4 x_i + x_{i+1} = b_i` via
/// Sherman–Morrison on the corner entries.
fn solve_cyclic(rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    // A = T + u vᵀ with u = (γ, 0, .., 0, 1), v = (1, 0, .., 0, 1/γ)
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let mut d1 = diag.clone();
    let mut x = rhs.to_vec();
    solve_unit_offdiag_tridiagonal(&mut d1, &mut x);
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = 1.0;
    solve_unit_offdiag_tridiagonal(&mut diag, &mut z);
    let fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    for (xi, zi) in x.iter_mut().zip(&z) {
        *xi -= fact * zi;
    }
    x
}

/// Hermite basis on the unit interval and its first two derivatives.
#[inline]
pub fn hermite_basis(t: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        [
            2.0 * t3 - 3.0 * t2 + 1.0,
            t3 - 2.0 * t2 + t,
            -2.0 * t3 + 3.0 * t2,
            t3 - t2,
        ],
        [
            6.0 * t2 - 6.0 * t,
            3.0 * t2 - 4.0 * t + 1.0,
            -6.0 * t2 + 6.0 * t,
            3.0 * t2 - 2.0 * t,
        ],
        [12.0 * t - 6.0, 6.0 * t - 4.0, -12.0 * t + 6.0, 6.0 * t - 2.0],
    )
}

/// Natural cubic spline through `(x0 + i·h, y_i)`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x0: f64, h: f64, values: Vec<f64>) -> Self {
        let slopes = natural_slopes(&values, h);
        Self { x0, h, values, slopes }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value, first and second derivative at `x` (clamped to the grid span).
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.values.len();
        let s = ((x - self.x0) / self.h).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        self.eval_in(i, s - i as f64)
    }

    /// Evaluates on interval `i` at local coordinate `t ∈ [0, 1]`.
    pub fn eval_in(&self, i: usize, t: f64) -> (f64, f64, f64) {
        let h = self.h;
        let (b, db, ddb) = hermite_basis(t);
        let c = [
            self.values[i],
            h * self.slopes[i],
            self.values[i + 1],
            h * self.slopes[i + 1],
        ];
        let dot = |w: [f64; 4]| w[0] * c[0] + w[1] * c[1] + w[2] * c[2] + w[3] * c[3];
        (dot(b), dot(db) / h, dot(ddb) / (h * h))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.eval(x).2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn natural_spline_reproduces_lines_exactly() {
        let ys: Vec<f64> = (0..11).map(|i| 2.0 + 0.5 * i as f64).collect();
        let s = CubicSpline::natural(0.0, 1.0, ys);
        for k in 0..40 {
            let x = k as f64 * 0.25;
            let (v, d, dd) = s.eval(x);
            assert!((v - (2.0 + 0.5 * x)).abs() < 1e-13);
            assert!((d - 0.5).abs() < 1e-13);
            assert!(dd.abs() < 1e-12);
        }
    }

    #[test]
    fn natural_spline_approximates_sine() {
        // sin has vanishing second derivative at 0 and π, matching the end conditions
        let n = 101;
        let h = PI / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let s = CubicSpline::natural(0.0, h, ys);
        for k in 0..300 {
            let x = k as f64 * PI / 299.0;
            let (v, d, dd) = s.eval(x);
            assert!((v - x.sin()).abs() < 1e-7);
            assert!((d - x.cos()).abs() < 1e-5);
            assert!((dd + x.sin()).abs() < 1e-3);
        }
    }

    #[test]
    fn periodic_slopes_match_derivative() {
        let n = 64;
        let h = TAU / n as f64;
        let ys: Vec<f64> = (0..n).map(|j| (3.0 * j as f64 * h).sin() + 0.2).collect();
        let d = periodic_slopes(&ys, h);
        for j in 0..n {
            let exact = 3.0 * (3.0 * j as f64 * h).cos();
            assert!((d[j] - exact).abs() < 2e-3, "{} vs {exact}", d[j]);
        }
        let c = periodic_slopes(&[1.5; 17], 0.3);
        assert!(c.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn interpolates_nodes() {
        let ys = vec![0.0, 1.0, -2.0, 0.5, 3.0];
        let s = CubicSpline::natural(1.0, 0.5, ys.clone());
        for (i, y) in ys.iter().enumerate() {
            assert!((s.value(1.0 + 0.5 * i as f64) - y).abs() < 1e-14);
        }
        assert!(s.second_derivative(1.0).abs() < 1e-12);
        assert!(s.second_derivative(3.0).abs() < 1e-12);
    }
}
