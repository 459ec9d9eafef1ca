//! The axisymmetric problem: on the unperturbed half torus the principal
//! eigenfunction depends on φ only and solves
//!
//! ```text
//! −((R + r cos φ) U′)′ = λ₁ r² (R + r cos φ) U,   U(0) = U(π) = 0.
//! ```
//!
//! The flux form is discretised directly, which gives a symmetric tridiagonal
//! matrix and a discrete flux `(R + r cos φ_{i+½})(U_{i+1} − U_i)/h` that is
//! strictly decreasing whenever `U > 0`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::TorusShape;
use crate::linalg::{inverse_power_principal, InverseIterOptions, SparseMatrix, TripletBuilder};
use crate::spline::CubicSpline;

/// Uniform grid `φ_i = i·π/(N−1)`, `i = 0..N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadialGrid {
    nodes: usize,
}

impl RadialGrid {
    pub const MIN_NODES: usize = 16;

    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "radial grid needs at least {} nodes, got {nodes}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn interior(&self) -> usize {
        self.nodes - 2
    }

    pub fn spacing(&self) -> f64 {
        PI / (self.nodes - 1) as f64
    }

    pub fn phi(&self, i: usize) -> f64 {
        if i == self.nodes - 1 {
            PI
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.phi(i)).collect()
    }
}

/// Principal eigenpair of the axisymmetric problem.
#[derive(Clone, Debug)]
pub struct RadialEigenpair {
    pub shape: TorusShape,
    pub grid: RadialGrid,
    pub lambda1: f64,
    /// `U(φ_i)`, normalised so that `‖U‖_{L²(T⁺)} = 1`; endpoints are zero.
    pub values: Vec<f64>,
    pub phi_star: f64,
    pub uprime0: f64,
    pub uprime_pi: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Stiffness and mass of the flux-form discretisation on the interior nodes.
pub fn assemble_radial(shape: &TorusShape, grid: &RadialGrid) -> (SparseMatrix, Vec<f64>) {
    let big_r = shape.major_radius();
    let r = shape.minor_radius();
    let h = grid.spacing();
    let m = grid.interior();
    let face = |i: usize| big_r + r * ((i as f64 + 0.5) * h).cos();
    let mut b = TripletBuilder::with_capacity(m, 3 * m);
    let mut mass = Vec::with_capacity(m);
    for k in 0..m {
        let i = k + 1;
        let left = face(i - 1) / h;
        let right = face(i) / h;
        b.push(k, k, left + right);
        if k > 0 {
            b.push(k, k - 1, -left);
        }
        if k + 1 < m {
            b.push(k, k + 1, -right);
        }
        mass.push(r * r * (big_r + r * grid.phi(i).cos()) * h);
    }
    (b.build(), mass)
}

/// `2π Σ h U_i² r (R + r cos φ_i)`.
pub fn surface_norm_sq(shape: &TorusShape, grid: &RadialGrid, values: &[f64]) -> f64 {
    let h = grid.spacing();
    let r = shape.minor_radius();
    TAU * values
        .iter()
        .enumerate()
        .map(|(i, u)| h * u * u * r * (shape.major_radius() + r * grid.phi(i).cos()))
        .sum::<f64>()
}

pub fn solve_radial(shape: &TorusShape, grid: &RadialGrid, opts: &InverseIterOptions) -> Result<RadialEigenpair> {
    if !shape.is_axisymmetric() {
        return Err(Error::InvalidShape(format!(
            "the radial problem needs eps = 0, got {}",
            shape.eps()
        )));
    }
    let (a, mass) = assemble_radial(shape, grid);
    let eig = inverse_power_principal(&a, &mass, opts)?;
    let scale = (shape.minor_radius() / TAU).sqrt();
    let mut values = Vec::with_capacity(grid.nodes());
    values.push(0.0);
    values.extend(eig.vector.iter().map(|v| v * scale));
    values.push(0.0);

    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(i) = values[1..grid.nodes() - 1].iter().position(|&u| u < -1e-13 * peak) {
        return Err(Error::Consistency(format!(
            "radial eigenfunction negative at node {} ({})",
            i + 1,
            values[i + 1]
        )));
    }
    let norm = surface_norm_sq(shape, grid, &values);
    for v in values.iter_mut() {
        *v /= norm.sqrt();
    }

    let phi_star = find_phi_star(shape, grid, &values)?.phi_star;
    let (uprime0, uprime_pi) = boundary_derivatives(grid, &values)?;
    Ok(RadialEigenpair {
        shape: *shape,
        grid: *grid,
        lambda1: eig.lambda,
        values,
        phi_star,
        uprime0,
        uprime_pi,
        residual: eig.residual,
        iterations: eig.iterations,
    })
}

impl RadialEigenpair {
    /// Natural cubic spline of `U`; `U″` vanishes at both ends of the exact
    /// solution, so the end conditions are consistent.
    pub fn spline(&self) -> CubicSpline {
        CubicSpline::natural(0.0, self.grid.spacing(), self.values.clone())
    }

    /// Discrete flux `(R + r cos φ_{i+½})(U_{i+1} − U_i)/h`, `i = 0..N−1`.
    pub fn fluxes(&self) -> Vec<f64> {
        discrete_fluxes(&self.shape, &self.grid, &self.values)
    }

    /// `Σ(R + r cos φ_{i+½})(ΔU)²/h / Σ r²(R + r cos φ_i) U_i² h`.
    pub fn rayleigh_quotient(&self) -> f64 {
        let h = self.grid.spacing();
        let big_r = self.shape.major_radius();
        let r = self.shape.minor_radius();
        let num: f64 = self
            .values
            .windows(2)
            .enumerate()
            .map(|(i, w)| (big_r + r * ((i as f64 + 0.5) * h).cos()) * (w[1] - w[0]).powi(2) / h)
            .sum();
        let den: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, u)| r * r * (big_r + r * self.grid.phi(i).cos()) * u * u * h)
            .sum();
        num / den
    }

    pub fn surface_norm_sq(&self) -> f64 {
        surface_norm_sq(&self.shape, &self.grid, &self.values)
    }

    /// `U` with every sample multiplied by `factor` (used for linearity checks).
    pub fn scaled(&self, factor: f64) -> RadialEigenpair {
        let mut p = self.clone();
        p.values.iter_mut().for_each(|v| *v *= factor);
        p.uprime0 *= factor;
        p.uprime_pi *= factor;
        p
    }
}

pub fn discrete_fluxes(shape: &TorusShape, grid: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let h = grid.spacing();
    values
        .windows(2)
        .enumerate()
        .map(|(i, w)| (shape.major_radius() + shape.minor_radius() * ((i as f64 + 0.5) * h).cos()) * (w[1] - w[0]) / h)
        .collect()
}

/// Location of the ridge `U′(φ*) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiStar {
    pub phi_star: f64,
    /// Index `i` with `F_i > 0 ≥ F_{i+1}`.
    pub flux_sign_index: usize,
    pub second_derivative: f64,
}

pub fn find_phi_star(shape: &TorusShape, grid: &RadialGrid, values: &[f64]) -> Result<PhiStar> {
    let flux = discrete_fluxes(shape, grid, values);
    if let Some(i) = flux.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::TheoremViolation(format!(
            "discrete flux not strictly decreasing at index {i}"
        )));
    }
    let changes: Vec<usize> = flux
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > 0.0 && w[1] <= 0.0)
        .map(|(i, _)| i)
        .collect();
    if changes.len() != 1 {
        return Err(Error::TheoremViolation(format!(
            "expected one sign change of the flux, found {}",
            changes.len()
        )));
    }
    let s = changes[0];

    let h = grid.spacing();
    let spline = CubicSpline::natural(0.0, h, values.to_vec());
    let slopes = spline.slopes();
    let max_slope = slopes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = grid.nodes() - 2;
    let j = (s.saturating_sub(1)..=(s + 2).min(last))
        .find(|&j| slopes[j] > 0.0 && slopes[j + 1] <= 0.0)
        .ok_or_else(|| {
            Error::TheoremViolation("spline derivative has no sign change next to the flux sign change".into())
        })?;

    let (mut lo, mut hi) = (grid.phi(j), grid.phi(j + 1));
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let d = spline.derivative(mid);
        if d.abs() <= 1e-10 * max_slope || hi - lo <= 4.0 * f64::EPSILON {
            break;
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let second = spline.second_derivative(mid);
    if !(second < 0.0) {
        return Err(Error::TheoremViolation(format!(
            "U'' at phi* is {second}, expected negative"
        )));
    }
    Ok(PhiStar {
        phi_star: mid,
        flux_sign_index: s,
        second_derivative: second,
    })
}

/// Second-order one-sided `U′(0)` and `U′(π)`; requires `U′(0) > 0 > U′(π)`.
pub fn boundary_derivatives(grid: &RadialGrid, values: &[f64]) -> Result<(f64, f64)> {
    let (d0, dpi) = one_sided_derivatives(grid, values);
    if !(d0 > 0.0 && dpi < 0.0) {
        return Err(Error::TheoremViolation(format!(
            "boundary derivatives U'(0) = {d0}, U'(pi) = {dpi} violate U'(0) > 0 > U'(pi)"
        )));
    }
    Ok((d0, dpi))
}

pub fn one_sided_derivatives(grid: &RadialGrid, values: &[f64]) -> (f64, f64) {
    let h = grid.spacing();
    let n = values.len();
    let d0 = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    let dpi = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    (d0, dpi)
}
