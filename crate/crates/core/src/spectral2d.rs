//! The Dirichlet problem for `−Δ_g` on the perturbed half torus.
//!
//! The operator is discretised in divergence form,
//!
//! ```text
//! Δ_g u = (1/(r_ε Φ)) [ ∂_φ(Φ/r_ε · u_φ) + ∂_θ(r_ε/Φ · u_θ) ],
//! ```
//!
//! with face-centred coefficients on a uniform `(φ, θ)` grid. Unknowns are the
//! interior φ-rows, ordered φ-major, so the matrix has bandwidth `Nθ`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{sin_cos_turns, TorusShape};
use crate::linalg::{inverse_power_principal, rayleigh_quotient, InverseIterOptions, SparseMatrix, TripletBuilder};

/// Tensor grid with `Nφ` nodes on `[0, π]` and `Nθ` periodic nodes on `S¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid2D {
    nphi: usize,
    ntheta: usize,
}

impl Grid2D {
    pub const MIN_NODES: usize = 16;

    pub fn new(nphi: usize, ntheta: usize) -> Result<Self> {
        if nphi < Self::MIN_NODES || ntheta < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "2D grid needs at least {} nodes per direction, got {nphi} x {ntheta}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { nphi, ntheta })
    }

    /// Smallest multiple of `4n` that is at least 64.
    pub fn auto_ntheta(mode: u32) -> usize {
        let step = 4 * mode.max(1) as usize;
        64usize.div_ceil(step) * step
    }

    pub fn nphi(&self) -> usize {
        self.nphi
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn hphi(&self) -> f64 {
        PI / (self.nphi - 1) as f64
    }

    pub fn htheta(&self) -> f64 {
        TAU / self.ntheta as f64
    }

    pub fn phi(&self, i: usize) -> f64 {
        if i == self.nphi - 1 {
            PI
        } else {
            i as f64 * self.hphi()
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.ntheta as f64
    }

    pub fn unknowns(&self) -> usize {
        (self.nphi - 2) * self.ntheta
    }

    /// Position of interior node `(i, j)` in the unknown vector, `1 ≤ i ≤ Nφ−2`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.ntheta + j % self.ntheta
    }

    /// True when the mirror planes and `θ_k` of mode `n` are all grid lines.
    pub fn resolves_symmetry(&self, mode: u32) -> bool {
        self.ntheta % (4 * mode as usize) == 0
    }
}

/// Nodal values on the full grid, boundary rows included, φ-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    nphi: usize,
    ntheta: usize,
    data: Vec<f64>,
}

impl Field2D {
    pub fn zeros(nphi: usize, ntheta: usize) -> Self {
        Self {
            nphi,
            ntheta,
            data: vec![0.0; nphi * ntheta],
        }
    }

    pub fn from_fn(grid: &Grid2D, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(grid.nphi(), grid.ntheta());
        for i in 0..grid.nphi() {
            for j in 0..grid.ntheta() {
                out.data[i * grid.ntheta() + j] = f(i, j);
            }
        }
        out
    }

    /// Embeds an interior unknown vector, padding the Dirichlet rows with zeros.
    pub fn from_interior(grid: &Grid2D, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.unknowns() {
            return Err(Error::DimensionMismatch {
                expected: grid.unknowns(),
                actual: interior.len(),
            });
        }
        let mut out = Self::zeros(grid.nphi(), grid.ntheta());
        out.data[grid.ntheta()..grid.ntheta() + interior.len()].copy_from_slice(interior);
        Ok(out)
    }

    pub fn nphi(&self) -> usize {
        self.nphi
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    /// Value at `(i, j)`; `j` wraps around.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ntheta + j % self.ntheta]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ntheta..(i + 1) * self.ntheta]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn interior(&self) -> &[f64] {
        &self.data[self.ntheta..(self.nphi - 1) * self.ntheta]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `max |self − other|`.
    pub fn max_abs_diff(&self, other: &Field2D) -> f64 {
        assert_eq!(
            (self.nphi, self.ntheta),
            (other.nphi, other.ntheta),
            "field shapes differ"
        );
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Face and node coefficients of one assembly, shared by the stiffness
/// matrix and the mass.
struct Coefficients {
    /// `Φ/r_ε · hθ/hφ` on the face `(φ_{i+½}, θ_j)`, `i = 0..Nφ−1`.
    phi_face: Vec<f64>,
    /// `r_ε/Φ · hφ/hθ` on the face `(φ_i, θ_{j+½})`, `i = 0..Nφ`.
    theta_face: Vec<f64>,
    /// `r_ε Φ hφ hθ` at `(φ_i, θ_j)`.
    mass: Vec<f64>,
}

fn coefficients(shape: &TorusShape, grid: &Grid2D) -> Coefficients {
    let (np, nt) = (grid.nphi(), grid.ntheta());
    let (hp, ht) = (grid.hphi(), grid.htheta());
    let big_r = shape.major_radius();
    let m = nt as i64;
    let node_tube: Vec<_> = (0..m).map(|j| shape.tube_at_turn(j, m)).collect();
    let face_tube: Vec<_> = (0..m).map(|j| shape.tube_at_turn(2 * j + 1, 2 * m)).collect();
    let big_phi = |cos_phi: f64, rho: f64, slope: f64| {
        let ring = big_r + rho * cos_phi;
        (ring * ring + slope * slope).sqrt()
    };

    let mut phi_face = Vec::with_capacity((np - 1) * nt);
    for i in 0..np - 1 {
        let c = ((i as f64 + 0.5) * hp).cos();
        for t in &node_tube {
            phi_face.push(big_phi(c, t.radius, t.slope) / t.radius * ht / hp);
        }
    }
    let mut theta_face = Vec::with_capacity(np * nt);
    let mut mass = Vec::with_capacity(np * nt);
    for i in 0..np {
        let c = grid.phi(i).cos();
        for (tf, tn) in face_tube.iter().zip(&node_tube) {
            theta_face.push(tf.radius / big_phi(c, tf.radius, tf.slope) * hp / ht);
            mass.push(tn.radius * big_phi(c, tn.radius, tn.slope) * hp * ht);
        }
    }
    Coefficients {
        phi_face,
        theta_face,
        mass,
    }
}

/// Stiffness matrix of `−Δ_g` (scaled by the node mass) and the mass diagonal
/// `√|g| hφ hθ` on the interior unknowns.
pub fn assemble_lb(shape: &TorusShape, grid: &Grid2D) -> (SparseMatrix, Vec<f64>) {
    assemble_lb_with(shape, grid, Execution::default())
}

pub fn assemble_lb_with(shape: &TorusShape, grid: &Grid2D, exec: Execution) -> (SparseMatrix, Vec<f64>) {
    let co = coefficients(shape, grid);
    let (np, nt) = (grid.nphi(), grid.ntheta());
    let rows: Vec<Vec<(usize, usize, f64)>> = exec.map_range(np - 2, |k| {
        let i = k + 1;
        let mut out = Vec::with_capacity(5 * nt);
        for j in 0..nt {
            let row = grid.index(i, j);
            let up = co.phi_face[i * nt + j];
            let down = co.phi_face[(i - 1) * nt + j];
            let right = co.theta_face[i * nt + j];
            let left = co.theta_face[i * nt + (j + nt - 1) % nt];
            out.push((row, row, up + down + right + left));
            if i + 1 < np - 1 {
                out.push((row, grid.index(i + 1, j), -up));
            }
            if i > 1 {
                out.push((row, grid.index(i - 1, j), -down));
            }
            out.push((row, grid.index(i, j + 1), -right));
            out.push((row, grid.index(i, j + nt - 1), -left));
        }
        out
    });
    let mut b = TripletBuilder::with_capacity(grid.unknowns(), 5 * grid.unknowns());
    for (r, c, v) in rows.into_iter().flatten() {
        b.push(r, c, v);
    }
    let mass = co.mass[nt..(np - 1) * nt].to_vec();
    (b.build(), mass)
}

/// Principal 2D eigenpair.
#[derive(Clone, Debug)]
pub struct EigenSolveResult {
    pub shape: TorusShape,
    pub grid: Grid2D,
    pub lambda1_eps: f64,
    /// `u^ε`, normalised in `L²` of the perturbed surface; zero on `φ ∈ {0, π}`.
    pub field: Field2D,
    pub residual: f64,
    pub iterations: usize,
}

pub fn solve_principal_2d(shape: &TorusShape, grid: &Grid2D, opts: &InverseIterOptions) -> Result<EigenSolveResult> {
    let (a, mass) = assemble_lb_with(shape, grid, opts.exec);
    let eig = inverse_power_principal(&a, &mass, opts)?;
    let peak = eig.vector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(k) = eig.vector.iter().position(|&v| v < -1e-13 * peak) {
        return Err(Error::Consistency(format!(
            "2D eigenfunction negative at unknown {k} ({})",
            eig.vector[k]
        )));
    }
    let field = Field2D::from_interior(grid, &eig.vector)?;
    Ok(EigenSolveResult {
        shape: *shape,
        grid: *grid,
        lambda1_eps: eig.lambda,
        field,
        residual: eig.residual,
        iterations: eig.iterations,
    })
}

/// Which trigonometric factor to project onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierKind {
    Sin,
    Cos,
}

/// Discrete Fourier coefficient of each φ-row of `field` on mode `k`.
///
/// For `k ≥ 1` the row is projected as `(2/Nθ) Σ_j f_j trig(kθ_j)`, for
/// `k = 0` (cos) as the row mean, so `f = a + b sin(kθ)` returns `b` exactly.
pub fn fourier_component(field: &Field2D, k: usize, kind: FourierKind) -> Vec<f64> {
    let nt = field.ntheta();
    let m = nt as i64;
    let weights: Vec<f64> = (0..m)
        .map(|j| {
            let (s, c) = sin_cos_turns(k as i64 * j, m);
            match kind {
                FourierKind::Sin => s,
                FourierKind::Cos => c,
            }
        })
        .collect();
    let scale = if k == 0 { 1.0 } else { 2.0 } / nt as f64;
    (0..field.nphi())
        .map(|i| scale * field.row(i).iter().zip(&weights).map(|(f, w)| f * w).sum::<f64>())
        .collect()
}

pub fn theta_fourier_component(result: &EigenSolveResult, k: usize, kind: FourierKind) -> Vec<f64> {
    fourier_component(&result.field, k, kind)
}

/// `Σ_i Σ_{k≥1} (|a_k|² + |b_k|²)` over all φ-rows: the energy that is not
/// constant in θ.
pub fn non_axisymmetric_power(field: &Field2D) -> f64 {
    let nt = field.ntheta();
    let mut total = 0.0;
    for i in 0..field.nphi() {
        let row = field.row(i);
        let mean = row.iter().sum::<f64>() / nt as f64;
        total += row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nt as f64;
    }
    total
}

impl EigenSolveResult {
    pub fn rayleigh_quotient(&self) -> Result<f64> {
        let (a, mass) = assemble_lb(&self.shape, &self.grid);
        rayleigh_quotient(&a, &mass, self.field.interior())
    }

    /// `Σ √|g| hφ hθ u²` over the grid.
    pub fn surface_norm_sq(&self) -> f64 {
        let co = coefficients(&self.shape, &self.grid);
        co.mass.iter().zip(self.field.data()).map(|(m, u)| m * u * u).sum()
    }

    /// Columns `θ_j` with `j` shifted by `offset` (the field evaluated at `θ + offset·hθ`).
    pub fn shifted(&self, offset: usize) -> Field2D {
        Field2D::from_fn(&self.grid, |i, j| self.field.get(i, j + offset))
    }

    /// The field evaluated at `π/n − θ_j`.
    pub fn reflected(&self) -> Field2D {
        let nt = self.grid.ntheta();
        let half = nt / (2 * self.shape.mode() as usize);
        Field2D::from_fn(&self.grid, |i, j| self.field.get(i, (half + nt - j % nt) % nt))
    }
}
