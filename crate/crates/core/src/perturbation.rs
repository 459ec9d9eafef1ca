//! First-order behaviour of the principal eigenpair in `ε`.
//!
//! Writing `u^ε = U + ε V + o(ε)` with `V = C₁(φ) cos(nθ) + C₂(φ) sin(nθ) + cU`,
//! the profile `C₂` solves
//!
//! ```text
//! C₂″ − (r sin φ/(R + r cos φ)) C₂′ − B_n C₂ = A,    C₂(0) = C₂(π) = 0,
//! A   = 2r[−λ₁U + R sin φ U′ / (2r(R + r cos φ)²)],
//! B_n = r²[n²/(R + r cos φ)² − λ₁],
//! ```
//!
//! and `C₁` solves the same problem with zero right side.
//!
//! The constant `c` is zero: differentiating `‖u^ε‖² = 1` at `ε = 0` leaves
//! `2c‖U‖² + ∫ U² ∂_ε√|g| + 2∫ U (C₁ cos nθ + C₂ sin nθ) √|g|`, and every term
//! but the first carries a factor `cos nθ` or `sin nθ` whose θ-integral
//! vanishes. The empirical `c` reported next to it is a diagnostic.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{sin_cos_turns, TorusShape};
use crate::linalg::{band_factor_solve, BandedMatrix, InverseIterOptions};
use crate::radial::{RadialEigenpair, RadialGrid};
use crate::spectral2d::{fourier_component, solve_principal_2d, EigenSolveResult, Field2D, FourierKind, Grid2D};
use crate::spline::CubicSpline;

/// Bound on the plug-back residual of the C₂ solve, relative to `‖A‖∞`.
pub const C2_RESIDUAL_FACTOR: f64 = 1e-6;
/// Bound on `‖C₁‖∞`.
pub const C1_TOLERANCE: f64 = 1e-12;

/// `A(φ)` with `U`, `U′` taken from the radial spline.
pub fn coefficient_a(pair: &RadialEigenpair, phi: f64) -> f64 {
    let (u, du, _) = pair.spline().eval(phi);
    coefficient_a_from(&pair.shape, pair.lambda1, phi, u, du)
}

pub fn coefficient_a_from(shape: &TorusShape, lambda1: f64, phi: f64, u: f64, du: f64) -> f64 {
    let big_r = shape.major_radius();
    let r = shape.minor_radius();
    let ring = big_r + r * phi.cos();
    let sin_phi = if phi == 0.0 || phi == std::f64::consts::PI {
        0.0
    } else {
        phi.sin()
    };
    2.0 * r * (-lambda1 * u + big_r * sin_phi / (2.0 * r * ring * ring) * du)
}

pub fn coefficient_bn(shape: &TorusShape, lambda1: f64, n: u32, phi: f64) -> f64 {
    let r = shape.minor_radius();
    let ring = shape.major_radius() + r * phi.cos();
    let n = f64::from(n);
    r * r * (n * n / (ring * ring) - lambda1)
}

/// `floor(√λ₁ (R + r)) + 1`.
pub fn min_mode_threshold(shape: &TorusShape, lambda1: f64) -> Result<u32> {
    if !(lambda1 > 0.0 && lambda1.is_finite()) {
        return Err(Error::Consistency(format!("lambda1 = {lambda1} must be positive")));
    }
    let x = lambda1.sqrt() * (shape.major_radius() + shape.minor_radius());
    Ok(x.floor() as u32 + 1)
}

/// `min B_n` over `samples` equally spaced points of `[0, π]`.
pub fn bn_min_scan(shape: &TorusShape, lambda1: f64, n: u32, samples: usize) -> f64 {
    let samples = samples.max(2);
    (0..samples)
        .map(|i| {
            coefficient_bn(
                shape,
                lambda1,
                n,
                std::f64::consts::PI * i as f64 / (samples - 1) as f64,
            )
        })
        .fold(f64::INFINITY, f64::min)
}

/// Node ordering of the banded BVP solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BandOrdering {
    #[default]
    Forward,
    Reversed,
}

/// Settings for [`solve_c2`] and [`verify_c1_zero`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BvpOptions {
    pub ordering: BandOrdering,
    /// Allows `n < Nmin`. Results are then outside the range where the
    /// solution is known to be unique.
    pub experimental_below_threshold: bool,
}

/// Solution of one mode BVP.
#[derive(Clone, Debug)]
pub struct BvpSolution {
    /// Samples on the radial grid, endpoints zero.
    pub values: Vec<f64>,
    /// `‖stencil(C) − B_n C − rhs‖∞` on interior nodes.
    pub residual: f64,
}

struct ModeOperator {
    /// `f_{i+½} = R + r cos φ_{i+½}`.
    face: Vec<f64>,
    /// `h² (R + r cos φ_i)`.
    node: Vec<f64>,
    bn: Vec<f64>,
}

impl ModeOperator {
    fn new(pair: &RadialEigenpair, n: u32) -> Self {
        let g = pair.grid;
        let h = g.spacing();
        let big_r = pair.shape.major_radius();
        let r = pair.shape.minor_radius();
        Self {
            face: (0..g.nodes() - 1)
                .map(|i| big_r + r * ((i as f64 + 0.5) * h).cos())
                .collect(),
            node: (0..g.nodes()).map(|i| h * h * (big_r + r * g.phi(i).cos())).collect(),
            bn: (0..g.nodes())
                .map(|i| coefficient_bn(&pair.shape, pair.lambda1, n, g.phi(i)))
                .collect(),
        }
    }

    /// Row `i` of `(1/f)(f C′)′ − B_n C` as `(lower, diag, upper)`.
    fn row(&self, i: usize) -> (f64, f64, f64) {
        let lo = self.face[i - 1] / self.node[i];
        let hi = self.face[i] / self.node[i];
        (lo, -(lo + hi) - self.bn[i], hi)
    }

    fn apply(&self, c: &[f64], i: usize) -> f64 {
        let (lo, d, hi) = self.row(i);
        lo * c[i - 1] + d * c[i] + hi * c[i + 1]
    }
}

/// Solves `(1/f)(f C′)′ − B_n C = rhs` with `C(0) = C(π) = 0` on the radial grid.
pub fn solve_mode_bvp(pair: &RadialEigenpair, n: u32, rhs: &[f64], ordering: BandOrdering) -> Result<BvpSolution> {
    let g = pair.grid;
    let nodes = g.nodes();
    if rhs.len() != nodes {
        return Err(Error::DimensionMismatch {
            expected: nodes,
            actual: rhs.len(),
        });
    }
    let op = ModeOperator::new(pair, n);
    let m = nodes - 2;
    // unknown k holds node pos(k)
    let pos = |k: usize| match ordering {
        BandOrdering::Forward => k + 1,
        BandOrdering::Reversed => m - k,
    };
    let mut a = BandedMatrix::zeros(m, 1, 1)?;
    let mut b = vec![0.0; m];
    for k in 0..m {
        let i = pos(k);
        let (lo, d, hi) = op.row(i);
        let (before, after) = match ordering {
            BandOrdering::Forward => (lo, hi),
            BandOrdering::Reversed => (hi, lo),
        };
        a.set(k, k, d);
        if k > 0 {
            a.set(k, k - 1, before);
        }
        if k + 1 < m {
            a.set(k, k + 1, after);
        }
        b[k] = rhs[i];
    }
    let x = band_factor_solve(&a, &b)?;
    let mut values = vec![0.0; nodes];
    for (k, v) in x.into_iter().enumerate() {
        values[pos(k)] = v;
    }
    let residual = (1..nodes - 1)
        .map(|i| (op.apply(&values, i) - rhs[i]).abs())
        .fold(0.0, f64::max);
    Ok(BvpSolution { values, residual })
}

fn check_threshold(pair: &RadialEigenpair, n: u32, opts: &BvpOptions) -> Result<u32> {
    let nmin = min_mode_threshold(&pair.shape, pair.lambda1)?;
    if n < nmin && !opts.experimental_below_threshold {
        return Err(Error::BelowThreshold { n, nmin });
    }
    Ok(nmin)
}

/// `A` at the radial nodes, using the spline slopes for `U′`.
pub fn sample_a(pair: &RadialEigenpair) -> Vec<f64> {
    let spline = pair.spline();
    (0..pair.grid.nodes())
        .map(|i| {
            coefficient_a_from(
                &pair.shape,
                pair.lambda1,
                pair.grid.phi(i),
                pair.values[i],
                spline.slopes()[i],
            )
        })
        .collect()
}

/// Solves for `C₂` and checks the plug-back residual.
pub fn solve_c2(pair: &RadialEigenpair, n: u32, opts: &BvpOptions) -> Result<BvpSolution> {
    check_threshold(pair, n, opts)?;
    let a = sample_a(pair);
    let sol = solve_mode_bvp(pair, n, &a, opts.ordering)?;
    let bound = C2_RESIDUAL_FACTOR * a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(sol.residual <= bound) {
        return Err(Error::ResidualExceeded {
            residual: sol.residual,
            bound,
        });
    }
    Ok(sol)
}

/// `‖C₁‖∞` from the homogeneous problem.
pub fn verify_c1_zero(pair: &RadialEigenpair, n: u32, opts: &BvpOptions) -> Result<f64> {
    check_threshold(pair, n, opts)?;
    let zero = vec![0.0; pair.grid.nodes()];
    let sol = solve_mode_bvp(pair, n, &zero, opts.ordering)?;
    let norm = sol.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm > C1_TOLERANCE {
        return Err(Error::TheoremViolation(format!("|C1| = {norm} exceeds {C1_TOLERANCE}")));
    }
    Ok(norm)
}

/// First-order data for one mode.
#[derive(Clone, Debug)]
pub struct PerturbationField {
    pub shape: TorusShape,
    pub grid: RadialGrid,
    pub mode: u32,
    pub nmin: u32,
    pub lambda1: f64,
    pub c2: Vec<f64>,
    pub c2_residual: f64,
    /// Constant in front of `U` in `V`; zero unless overridden.
    pub c: f64,
    pub a: Vec<f64>,
    pub bn: Vec<f64>,
    pub below_threshold: bool,
    u: CubicSpline,
    c2_spline: CubicSpline,
}

impl PerturbationField {
    pub fn new(pair: &RadialEigenpair, n: u32, opts: &BvpOptions) -> Result<Self> {
        let nmin = check_threshold(pair, n, opts)?;
        let sol = solve_c2(pair, n, opts)?;
        let h = pair.grid.spacing();
        Ok(Self {
            shape: pair.shape,
            grid: pair.grid,
            mode: n,
            nmin,
            lambda1: pair.lambda1,
            c2_residual: sol.residual,
            c2_spline: CubicSpline::natural(0.0, h, sol.values.clone()),
            c2: sol.values,
            c: 0.0,
            a: sample_a(pair),
            bn: (0..pair.grid.nodes())
                .map(|i| coefficient_bn(&pair.shape, pair.lambda1, n, pair.grid.phi(i)))
                .collect(),
            below_threshold: n < nmin,
            u: pair.spline(),
        })
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn c2_at(&self, phi: f64) -> f64 {
        self.c2_spline.value(phi)
    }

    /// `V(φ, θ) = C₂(φ) sin(nθ) + c U(φ)`.
    pub fn first_order_field(&self, phi: f64, theta: f64) -> f64 {
        self.c2_at(phi) * (f64::from(self.mode) * theta).sin() + self.c * self.u.value(phi)
    }

    /// `V` at the nodes of a 2D grid with the same φ-spacing as the radial grid;
    /// `sin(nθ_j)` is evaluated exactly on the turn lattice.
    pub fn first_order_on_grid(&self, grid: &Grid2D) -> Result<Field2D> {
        self.check_grid(grid)?;
        let m = grid.ntheta() as i64;
        let sines: Vec<f64> = (0..m).map(|j| sin_cos_turns(i64::from(self.mode) * j, m).0).collect();
        Ok(Field2D::from_fn(grid, |i, j| {
            self.c2[i] * sines[j] + self.c * self.u.values()[i]
        }))
    }

    fn check_grid(&self, grid: &Grid2D) -> Result<()> {
        if grid.nphi() != self.grid.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.nodes(),
                actual: grid.nphi(),
            });
        }
        Ok(())
    }

    pub fn bn_min(&self) -> f64 {
        self.bn[1..self.bn.len() - 1]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(u^ε − U)/ε` on the 2D grid.
pub fn difference_quotient(pair: &RadialEigenpair, twod: &EigenSolveResult) -> Result<Field2D> {
    let eps = twod.shape.eps();
    if eps == 0.0 {
        return Err(Error::InvalidShape("difference quotient needs eps != 0".into()));
    }
    if twod.grid.nphi() != pair.grid.nodes() {
        return Err(Error::DimensionMismatch {
            expected: pair.grid.nodes(),
            actual: twod.grid.nphi(),
        });
    }
    Ok(Field2D::from_fn(&twod.grid, |i, j| {
        (twod.field.get(i, j) - pair.values[i]) / eps
    }))
}

/// The two estimates of `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantEstimate {
    pub analytic: f64,
    /// `⟨(u^ε − U)/ε, U⟩` in `L²` of the unperturbed surface.
    pub empirical: f64,
}

pub fn determine_c(pair: &RadialEigenpair, twod: &EigenSolveResult) -> Result<ConstantEstimate> {
    let d = difference_quotient(pair, twod)?;
    let g = twod.grid;
    let big_r = pair.shape.major_radius();
    let r = pair.shape.minor_radius();
    let w = g.hphi() * g.htheta();
    let mut sum = 0.0;
    for i in 0..g.nphi() {
        let area = r * (big_r + r * g.phi(i).cos()) * w;
        sum += area * pair.values[i] * d.row(i).iter().sum::<f64>();
    }
    Ok(ConstantEstimate {
        analytic: 0.0,
        empirical: sum,
    })
}

/// Errors of the first-order prediction at one amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstOrderCheck {
    pub eps: f64,
    /// `‖(u^ε − U)/ε − C₂ sin nθ‖∞`.
    pub field_error: f64,
    /// `max |b_n(φ) − C₂(φ)|`, `b_n` the sin(nθ) coefficient of the quotient.
    pub sin_error: f64,
    /// `max |a_n(φ)|`, the cos(nθ) coefficient of the quotient.
    pub cos_magnitude: f64,
    pub c: ConstantEstimate,
}

pub fn first_order_check(
    pair: &RadialEigenpair,
    field: &PerturbationField,
    twod: &EigenSolveResult,
) -> Result<FirstOrderCheck> {
    let d = difference_quotient(pair, twod)?;
    let v = field.clone().with_c(0.0).first_order_on_grid(&twod.grid)?;
    let n = field.mode as usize;
    let sin = fourier_component(&d, n, FourierKind::Sin);
    let cos = fourier_component(&d, n, FourierKind::Cos);
    Ok(FirstOrderCheck {
        eps: twod.shape.eps(),
        field_error: d.max_abs_diff(&v),
        sin_error: sin.iter().zip(&field.c2).fold(0.0f64, |m, (s, c)| m.max((s - c).abs())),
        cos_magnitude: cos.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        c: determine_c(pair, twod)?,
    })
}

/// Outcome of an ε-sweep at fixed mode.
#[derive(Clone, Debug)]
pub struct StationarityReport {
    pub mode: u32,
    pub lambda0: f64,
    pub eps: Vec<f64>,
    pub lambda_eps: Vec<f64>,
    /// `|λ₁^ε − λ₁|`.
    pub delta: Vec<f64>,
    /// Least-squares slope of `log δ` against `log |ε|`.
    pub slope: f64,
    pub solves: Vec<EigenSolveResult>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Solves the 2D problem at `ε = 0` and at every entry of `eps_list`
/// (independently, in parallel under `opts.exec`) and fits the slope.
pub fn eigenvalue_stationarity(
    shape: &TorusShape,
    n: u32,
    eps_list: &[f64],
    grid: &Grid2D,
    opts: &InverseIterOptions,
) -> Result<StationarityReport> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidShape(
            "stationarity needs at least three amplitudes".into(),
        ));
    }
    if eps_list.windows(2).any(|w| !(w[1].abs() < w[0].abs())) || eps_list.contains(&0.0) {
        return Err(Error::InvalidShape(
            "amplitudes must be nonzero with decreasing magnitude".into(),
        ));
    }
    let base = shape.with_mode(n)?;
    let mut all = vec![0.0];
    all.extend_from_slice(eps_list);
    let shapes = all.iter().map(|&e| base.with_eps(e)).collect::<Result<Vec<_>>>()?;
    let inner = InverseIterOptions {
        exec: if opts.exec.is_parallel() {
            Execution::Sequential
        } else {
            opts.exec
        },
        ..*opts
    };
    let mut solves = opts
        .exec
        .map(&shapes, |s| solve_principal_2d(s, grid, &inner))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let zero = solves.remove(0);
    let lambda_eps: Vec<f64> = solves.iter().map(|s| s.lambda1_eps).collect();
    let delta: Vec<f64> = lambda_eps.iter().map(|l| (l - zero.lambda1_eps).abs()).collect();
    Ok(StationarityReport {
        mode: n,
        lambda0: zero.lambda1_eps,
        eps: eps_list.to_vec(),
        slope: log_log_slope(eps_list, &delta),
        lambda_eps,
        delta,
        solves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::solve_radial;
    use std::f64::consts::PI;

    fn pair(n: usize) -> RadialEigenpair {
        let s = TorusShape::unperturbed(2.0, 1.0).unwrap();
        solve_radial(&s, &RadialGrid::new(n).unwrap(), &InverseIterOptions::default()).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let s = TorusShape::unperturbed(2.0, 1.0).unwrap();
        assert_eq!(min_mode_threshold(&s, 1.0).unwrap(), 4);
        assert_eq!(min_mode_threshold(&s, 0.25).unwrap(), 2);
        assert!(min_mode_threshold(&s, 0.0).is_err());
    }

    #[test]
    fn bn_root_and_minimum() {
        let s = TorusShape::unperturbed(2.0, 1.0).unwrap();
        // n² = λ(R + r cos φ)² at φ = π/2 for λ = n²/4
        assert!(coefficient_bn(&s, 9.0 / 4.0, 3, PI / 2.0).abs() < 1e-15);
        let at0 = coefficient_bn(&s, 1.0, 3, 0.0);
        assert!((1..100).all(|i| coefficient_bn(&s, 1.0, 3, PI * i as f64 / 100.0) > at0));
    }

    #[test]
    fn bn_positive_from_threshold_on() {
        let p = pair(401);
        let nmin = min_mode_threshold(&p.shape, p.lambda1).unwrap();
        assert_eq!(nmin, 3);
        for n in nmin..nmin + 6 {
            assert!(bn_min_scan(&p.shape, p.lambda1, n, 10_000) > 0.0);
        }
        assert!(bn_min_scan(&p.shape, p.lambda1, nmin - 1, 10_000) < 0.0);
    }

    #[test]
    fn a_at_special_points() {
        let p = pair(401);
        assert_eq!(coefficient_a(&p, 0.0), 0.0);
        assert!(coefficient_a(&p, PI).abs() < 1e-15);
        let u = p.spline().value(p.phi_star);
        let expected = -2.0 * p.shape.minor_radius() * p.lambda1 * u;
        assert!((coefficient_a(&p, p.phi_star) - expected).abs() < 1e-10 * expected.abs());
        assert!(expected < 0.0);
    }

    #[test]
    fn c2_positive_with_small_residual() {
        let p = pair(401);
        for n in 3..9 {
            let f = PerturbationField::new(&p, n, &BvpOptions::default()).unwrap();
            assert_eq!(f.c2[0], 0.0);
            assert_eq!(*f.c2.last().unwrap(), 0.0);
            assert!(f.c2_at(p.phi_star) > 0.0);
            let amax = f.a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(f.c2_residual <= 1e-6 * amax);
            assert!(f.bn_min() > 0.0);
        }
    }

    #[test]
    fn ordering_does_not_change_the_solution() {
        let p = pair(401);
        let fwd = solve_c2(&p, 3, &BvpOptions::default()).unwrap();
        let rev = solve_c2(
            &p,
            3,
            &BvpOptions {
                ordering: BandOrdering::Reversed,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in fwd.values.iter().zip(&rev.values) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn bvp_is_linear() {
        let p = pair(201);
        let a = sample_a(&p);
        let a2: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let c = solve_mode_bvp(&p, 4, &a, BandOrdering::Forward).unwrap();
        let c2 = solve_mode_bvp(&p, 4, &a2, BandOrdering::Forward).unwrap();
        for (x, y) in c.values.iter().zip(&c2.values) {
            assert!((y - 2.0 * x).abs() <= 1e-14 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn c1_vanishes_and_threshold_is_enforced() {
        let p = pair(201);
        assert_eq!(verify_c1_zero(&p, 3, &BvpOptions::default()).unwrap(), 0.0);
        assert!(matches!(
            verify_c1_zero(&p, 2, &BvpOptions::default()),
            Err(Error::BelowThreshold { n: 2, nmin: 3 })
        ));
        assert!(matches!(
            PerturbationField::new(&p, 1, &BvpOptions::default()),
            Err(Error::BelowThreshold { .. })
        ));
        let exp = BvpOptions {
            experimental_below_threshold: true,
            ..Default::default()
        };
        assert!(PerturbationField::new(&p, 2, &exp).unwrap().below_threshold);
    }

    #[test]
    fn first_order_field_special_angles() {
        let p = pair(201);
        let f = PerturbationField::new(&p, 3, &BvpOptions::default()).unwrap();
        for i in 0..=20 {
            let phi = PI * i as f64 / 20.0;
            assert_eq!(f.first_order_field(phi, 0.0), 0.0);
            assert!((f.first_order_field(phi, PI / 6.0) - f.c2_at(phi)).abs() < 1e-15);
        }
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let x = [0.04, 0.02, 0.01];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((log_log_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stationarity_rejects_bad_lists() {
        let s = TorusShape::unperturbed(2.0, 1.0).unwrap();
        let g = Grid2D::new(16, 16).unwrap();
        let o = InverseIterOptions::default();
        assert!(eigenvalue_stationarity(&s, 3, &[0.02, 0.01], &g, &o).is_err());
        assert!(eigenvalue_stationarity(&s, 3, &[0.01, 0.02, 0.04], &g, &o).is_err());
    }
}
