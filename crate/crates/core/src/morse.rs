//! Critical points of the computed eigenfunction.
//!
//! The nodal field is lifted to a tensor-product cubic spline (natural in φ,
//! periodic in θ). Cells where both partials can vanish seed a damped Newton
//! iteration on the spline gradient, and the converged points are classified
//! by the spline Hessian.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::perturbation::min_mode_threshold;
use crate::radial::RadialEigenpair;
use crate::spectral2d::{non_axisymmetric_power, EigenSolveResult, Field2D, Grid2D};
use crate::spline::{hermite_basis, natural_slopes, periodic_slopes, CubicSpline};

/// Value and first two coordinate derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d_phi: f64,
    pub d_theta: f64,
    pub d_phiphi: f64,
    pub d_phitheta: f64,
    pub d_thetatheta: f64,
}

impl Jet {
    pub fn grad_norm(&self) -> f64 {
        self.d_phi.hypot(self.d_theta)
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        [[self.d_phiphi, self.d_phitheta], [self.d_phitheta, self.d_thetatheta]]
    }
}

/// Bicubic Hermite interpolant of a [`Field2D`].
#[derive(Clone, Debug)]
pub struct BicubicField {
    grid: Grid2D,
    f: Vec<f64>,
    f_phi: Vec<f64>,
    f_theta: Vec<f64>,
    f_phitheta: Vec<f64>,
}

fn columns_slopes(data: &[f64], np: usize, nt: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0; np * nt];
    let mut col = vec![0.0; np];
    for j in 0..nt {
        for i in 0..np {
            col[i] = data[i * nt + j];
        }
        for (i, s) in natural_slopes(&col, h).into_iter().enumerate() {
            out[i * nt + j] = s;
        }
    }
    out
}

impl BicubicField {
    pub fn new(grid: &Grid2D, field: &Field2D) -> Self {
        let (np, nt) = (grid.nphi(), grid.ntheta());
        let f = field.data().to_vec();
        let f_theta: Vec<f64> = (0..np)
            .flat_map(|i| periodic_slopes(field.row(i), grid.htheta()))
            .collect();
        let f_phi = columns_slopes(&f, np, nt, grid.hphi());
        let f_phitheta = columns_slopes(&f_theta, np, nt, grid.hphi());
        Self {
            grid: *grid,
            f,
            f_phi,
            f_theta,
            f_phitheta,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Spline `∂_φ u` at node `(i, j)`.
    pub fn node_d_phi(&self, i: usize, j: usize) -> f64 {
        self.f_phi[i * self.grid.ntheta() + j % self.grid.ntheta()]
    }

    /// Spline `∂_θ u` at node `(i, j)`.
    pub fn node_d_theta(&self, i: usize, j: usize) -> f64 {
        self.f_theta[i * self.grid.ntheta() + j % self.grid.ntheta()]
    }

    pub fn max_node_gradient(&self) -> f64 {
        self.f_phi
            .iter()
            .zip(&self.f_theta)
            .fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Interpolant and derivatives at `(φ, θ)`; φ is clamped to `[0, π]`.
    pub fn jet(&self, phi: f64, theta: f64) -> Jet {
        let g = &self.grid;
        let (np, nt) = (g.nphi(), g.ntheta());
        let (hp, ht) = (g.hphi(), g.htheta());
        let s = (phi / hp).clamp(0.0, (np - 1) as f64);
        let i = (s.floor() as usize).min(np - 2);
        let tp = s - i as f64;
        let u = theta.rem_euclid(TAU) / ht;
        let j = (u.floor() as usize).min(nt - 1);
        let tt = u - j as f64;
        let j1 = (j + 1) % nt;

        let (bp, dbp, ddbp) = hermite_basis(tp);
        let (bt, dbt, ddbt) = hermite_basis(tt);
        let at = |arr: &[f64], ii: usize, jj: usize| arr[ii * nt + jj];
        // θ-Hermite combination of (value, φ-slope) rows at φ-node ii
        let theta_mix = |w: &[f64; 4], ii: usize, val: &[f64], slope: &[f64]| {
            w[0] * at(val, ii, j)
                + w[1] * ht * at(slope, ii, j)
                + w[2] * at(val, ii, j1)
                + w[3] * ht * at(slope, ii, j1)
        };
        let combine = |wp: &[f64; 4], wt: &[f64; 4]| {
            let c = [
                theta_mix(wt, i, &self.f, &self.f_theta),
                hp * theta_mix(wt, i, &self.f_phi, &self.f_phitheta),
                theta_mix(wt, i + 1, &self.f, &self.f_theta),
                hp * theta_mix(wt, i + 1, &self.f_phi, &self.f_phitheta),
            ];
            wp[0] * c[0] + wp[1] * c[1] + wp[2] * c[2] + wp[3] * c[3]
        };
        Jet {
            value: combine(&bp, &bt),
            d_phi: combine(&dbp, &bt) / hp,
            d_theta: combine(&bp, &dbt) / ht,
            d_phiphi: combine(&ddbp, &bt) / (hp * hp),
            d_phitheta: combine(&dbp, &dbt) / (hp * ht),
            d_thetatheta: combine(&bp, &ddbt) / (ht * ht),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Maximum,
    Saddle,
    Minimum,
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalKind::Maximum => "maximum",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Minimum => "minimum",
            CriticalKind::Degenerate => "degenerate",
        }
    }
}

/// Relative determinant below which a Hessian counts as degenerate.
pub const DEGENERATE_DET: f64 = 1e-10;

pub fn classify(h: [[f64; 2]; 2]) -> CriticalKind {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let scale = h[0][0].abs().max(h[1][1].abs()).max(h[0][1].abs()).powi(2);
    if scale == 0.0 || det.abs() < DEGENERATE_DET * scale {
        CriticalKind::Degenerate
    } else if det < 0.0 {
        CriticalKind::Saddle
    } else if h[0][0] + h[1][1] < 0.0 {
        CriticalKind::Maximum
    } else {
        CriticalKind::Minimum
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub phi: f64,
    pub theta: f64,
    pub kind: CriticalKind,
    pub value: f64,
    pub grad_norm: f64,
    pub hessian: [[f64; 2]; 2],
}

/// Critical set of the computed eigenfunction.
#[derive(Clone, Debug, PartialEq)]
pub enum CriticalSet {
    /// Axisymmetric field: a whole circle `φ = phi` of critical points.
    Circle {
        phi: f64,
        fourier_power: f64,
    },
    Isolated(Vec<CriticalPoint>),
}

impl CriticalSet {
    pub fn points(&self) -> &[CriticalPoint] {
        match self {
            CriticalSet::Circle { .. } => &[],
            CriticalSet::Isolated(p) => p,
        }
    }
}

/// Settings for [`find_critical_points`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorseOptions {
    pub max_newton: usize,
    pub damping: f64,
    pub dedupe: f64,
    /// Newton stops at `grad_norm ≤ grad_tol · max nodal gradient`.
    pub grad_tol: f64,
    /// Fourier power below which the field counts as axisymmetric.
    pub circle_power: f64,
    pub exec: Execution,
}

impl Default for MorseOptions {
    fn default() -> Self {
        Self {
            max_newton: 50,
            damping: 0.5,
            dedupe: 1e-6,
            grad_tol: 1e-10,
            circle_power: 1e-10,
            exec: Execution::default(),
        }
    }
}

/// Result of a critical-point search with its diagnostics.
#[derive(Clone, Debug)]
pub struct CriticalSearch {
    pub set: CriticalSet,
    pub candidates: usize,
    /// Candidates whose Newton iteration failed.
    pub dropped: usize,
    pub fourier_power: f64,
    pub diagnostics: Vec<String>,
}

pub fn find_critical_points(result: &EigenSolveResult, opts: &MorseOptions) -> Result<CriticalSearch> {
    find_critical_points_in(&result.grid, &result.field, opts)
}

pub fn find_critical_points_in(grid: &Grid2D, field: &Field2D, opts: &MorseOptions) -> Result<CriticalSearch> {
    let power = non_axisymmetric_power(field);
    if power < opts.circle_power {
        let profile: Vec<f64> = (0..grid.nphi())
            .map(|i| field.row(i).iter().sum::<f64>() / grid.ntheta() as f64)
            .collect();
        let phi = profile_ridge(&profile, grid.hphi())?;
        return Ok(CriticalSearch {
            set: CriticalSet::Circle {
                phi,
                fourier_power: power,
            },
            candidates: 0,
            dropped: 0,
            fourier_power: power,
            diagnostics: Vec::new(),
        });
    }

    let spline = BicubicField::new(grid, field);
    let (np, nt) = (grid.nphi(), grid.ntheta());
    let straddles = |vals: [f64; 4]| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut cells = Vec::new();
    for i in 0..np - 1 {
        for j in 0..nt {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let dp = corners.map(|(a, b)| spline.node_d_phi(a, b));
            let dt = corners.map(|(a, b)| spline.node_d_theta(a, b));
            if straddles(dp) && straddles(dt) {
                cells.push((i, j));
            }
        }
    }

    let tol = opts.grad_tol * spline.max_node_gradient();
    let outcomes = opts.exec.map(&cells, |&(i, j)| {
        let phi0 = (i as f64 + 0.5) * grid.hphi();
        let theta0 = (j as f64 + 0.5) * grid.htheta();
        newton(&spline, phi0, theta0, tol, opts)
    });

    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut dropped = 0;
    for (cell, out) in cells.iter().zip(outcomes) {
        match out {
            Ok(p) => {
                let dup = points.iter().any(|q| {
                    (q.phi - p.phi).abs() <= opts.dedupe && circular_distance(q.theta, p.theta) <= opts.dedupe
                });
                if !dup {
                    points.push(p);
                }
            }
            Err(msg) => {
                dropped += 1;
                diagnostics.push(format!("cell ({}, {}): {msg}", cell.0, cell.1));
            }
        }
    }
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.phi.total_cmp(&b.phi)));
    Ok(CriticalSearch {
        set: CriticalSet::Isolated(points),
        candidates: cells.len(),
        dropped,
        fourier_power: power,
        diagnostics,
    })
}

fn newton(
    spline: &BicubicField,
    phi0: f64,
    theta0: f64,
    tol: f64,
    opts: &MorseOptions,
) -> std::result::Result<CriticalPoint, String> {
    let (mut phi, mut theta) = (phi0, theta0);
    let mut jet = spline.jet(phi, theta);
    for _ in 0..=opts.max_newton {
        let gn = jet.grad_norm();
        if gn <= tol {
            return Ok(CriticalPoint {
                phi,
                theta,
                kind: classify(jet.hessian()),
                value: jet.value,
                grad_norm: gn,
                hessian: jet.hessian(),
            });
        }
        let [[a, b], [_, d]] = jet.hessian();
        let det = a * d - b * b;
        if det == 0.0 || !det.is_finite() {
            return Err("singular Hessian".into());
        }
        let sp = (d * jet.d_phi - b * jet.d_theta) / det;
        let st = (a * jet.d_theta - b * jet.d_phi) / det;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-8 {
            let np = phi - alpha * sp;
            let nt = (theta - alpha * st).rem_euclid(TAU);
            if np > 0.0 && np < PI {
                let trial = spline.jet(np, nt);
                if trial.grad_norm() < gn {
                    phi = np;
                    theta = nt;
                    jet = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= opts.damping;
        }
        if !accepted {
            return Err(format!("line search stalled at |grad| = {gn:e}"));
        }
    }
    Err(format!("no convergence after {} steps", opts.max_newton))
}

/// Distance on the circle of length 2π.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Maximum of a profile vanishing at both ends, from its natural spline.
fn profile_ridge(profile: &[f64], h: f64) -> Result<f64> {
    let s = CubicSpline::natural(0.0, h, profile.to_vec());
    let slopes = s.slopes();
    let peak = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo_idx = peak.saturating_sub(1);
    let hi_idx = (peak + 1).min(profile.len() - 1);
    let j = (lo_idx..hi_idx)
        .find(|&j| slopes[j] > 0.0 && slopes[j + 1] <= 0.0)
        .ok_or_else(|| Error::TheoremViolation("axisymmetric profile has no interior ridge".into()))?;
    let (mut lo, mut hi) = (j as f64 * h, (j + 1) as f64 * h);
    let scale = slopes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let d = s.derivative(mid);
        if d.abs() <= 1e-12 * scale || hi - lo <= 4.0 * f64::EPSILON {
            break;
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Tolerances for [`verify_theorem`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tol_theta: f64,
    pub tol_phi_band: f64,
    pub experimental_below_threshold: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol_theta: 1e-2,
            tol_phi_band: 5e-2,
            experimental_below_threshold: false,
        }
    }
}

/// Verdicts on a set of critical points.
#[derive(Clone, Debug)]
pub struct CriticalPointReport {
    pub points: Vec<CriticalPoint>,
    /// `θ_k` index matched to each point, if any.
    pub assigned: Vec<Option<usize>>,
    pub mode: u32,
    pub eps: f64,
    pub expected_count: usize,
    pub phi_star: f64,
    pub tol_theta: f64,
    pub tol_phi_band: f64,
    pub count_ok: bool,
    pub location_ok: bool,
    pub band_ok: bool,
    pub alternation_ok: bool,
    pub euler_ok: bool,
    pub maxima: usize,
    pub saddles: usize,
    pub max_theta_deviation: f64,
    pub max_phi_deviation: f64,
    pub failures: Vec<String>,
}

impl CriticalPointReport {
    pub fn passed(&self) -> bool {
        self.count_ok && self.location_ok && self.band_ok && self.alternation_ok && self.euler_ok
    }
}

/// `θ_k = (2k+1)π/(2n)`.
pub fn theta_k(n: u32, k: usize) -> f64 {
    (2 * k + 1) as f64 * PI / (2 * n) as f64
}

pub fn verify_theorem(
    points: &[CriticalPoint],
    eps: f64,
    n: u32,
    pair: &RadialEigenpair,
    opts: &VerifyOptions,
) -> Result<CriticalPointReport> {
    if eps == 0.0 {
        return Err(Error::InvalidShape("the isolated-point check needs eps != 0".into()));
    }
    let nmin = min_mode_threshold(&pair.shape, pair.lambda1)?;
    if n < nmin && !opts.experimental_below_threshold {
        return Err(Error::BelowThreshold { n, nmin });
    }
    let count = 2 * n as usize;
    let mut failures = Vec::new();

    let count_ok = points.len() == count;
    if !count_ok {
        failures.push(format!("found {} critical points, expected {count}", points.len()));
    }

    let mut assigned = Vec::with_capacity(points.len());
    let mut used = vec![false; count];
    let mut location_ok = count_ok;
    let mut max_theta_deviation = 0.0f64;
    for p in points {
        let (k, dist) = (0..count)
            .map(|k| (k, circular_distance(p.theta, theta_k(n, k))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one target angle");
        max_theta_deviation = max_theta_deviation.max(dist);
        if dist <= opts.tol_theta && !used[k] {
            used[k] = true;
            assigned.push(Some(k));
        } else {
            location_ok = false;
            assigned.push(None);
            failures.push(format!(
                "point ({:.6}, {:.6}) is {dist:.3e} from theta_{k}{}",
                p.phi,
                p.theta,
                if used[k] { " (already taken)" } else { "" }
            ));
        }
    }

    let mut band_ok = true;
    let mut max_phi_deviation = 0.0f64;
    for p in points {
        let d = (p.phi - pair.phi_star).abs();
        max_phi_deviation = max_phi_deviation.max(d);
        if d > opts.tol_phi_band {
            band_ok = false;
            failures.push(format!("point ({:.6}, {:.6}) is {d:.3e} from phi*", p.phi, p.theta));
        }
    }

    // maxima sit on even k for ε > 0 and on odd k for ε < 0
    let max_parity = if eps > 0.0 { 0 } else { 1 };
    let mut alternation_ok = location_ok;
    for (p, k) in points.iter().zip(&assigned) {
        if let Some(k) = k {
            let expected = if k % 2 == max_parity {
                CriticalKind::Maximum
            } else {
                CriticalKind::Saddle
            };
            if p.kind != expected {
                alternation_ok = false;
                failures.push(format!(
                    "point at theta_{k} is a {}, expected a {}",
                    p.kind.as_str(),
                    expected.as_str()
                ));
            }
        }
    }
    let maxima = points.iter().filter(|p| p.kind == CriticalKind::Maximum).count();
    let saddles = points.iter().filter(|p| p.kind == CriticalKind::Saddle).count();
    let others = points.len() - maxima - saddles;
    let euler_ok = maxima == saddles && others == 0;
    if !euler_ok {
        failures.push(format!("{maxima} maxima, {saddles} saddles, {others} other points"));
    }

    Ok(CriticalPointReport {
        points: points.to_vec(),
        assigned,
        mode: n,
        eps,
        expected_count: count,
        phi_star: pair.phi_star,
        tol_theta: opts.tol_theta,
        tol_phi_band: opts.tol_phi_band,
        count_ok,
        location_ok,
        band_ok,
        alternation_ok,
        euler_ok,
        maxima,
        saddles,
        max_theta_deviation,
        max_phi_deviation,
        failures,
    })
}

/// Centred θ-differences along the grid column `θ = θ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaProfile {
    pub k: usize,
    pub column: usize,
    pub phi: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

pub fn theta_derivative_profile(result: &EigenSolveResult, k: usize) -> Result<ThetaProfile> {
    let g = result.grid;
    let n = result.shape.mode();
    if !g.resolves_symmetry(n) {
        return Err(Error::InvalidGrid(format!(
            "N_theta = {} is not a multiple of 4n = {}",
            g.ntheta(),
            4 * n
        )));
    }
    if k >= 2 * n as usize {
        return Err(Error::InvalidGrid(format!("k = {k} out of range for n = {n}")));
    }
    let nt = g.ntheta();
    let column = (2 * k + 1) * nt / (4 * n as usize);
    let ht = g.htheta();
    let f = &result.field;
    let mut first = Vec::with_capacity(g.nphi());
    let mut second = Vec::with_capacity(g.nphi());
    for i in 0..g.nphi() {
        let (l, c, r) = (f.get(i, column + nt - 1), f.get(i, column), f.get(i, column + 1));
        first.push((r - l) / (2.0 * ht));
        second.push((r - 2.0 * c + l) / (ht * ht));
    }
    Ok(ThetaProfile {
        k,
        column,
        phi: (0..g.nphi()).map(|i| g.phi(i)).collect(),
        first,
        second,
    })
}

/// Sign and symmetry checks of a [`ThetaProfile`] near the ridge.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaProfileCheck {
    pub k: usize,
    pub max_first: f64,
    pub first_bound: f64,
    /// Sign the second derivative must have on the band: `-1` at maxima.
    pub expected_sign: f64,
    pub band_nodes: usize,
    /// Smallest `sign · ∂²_θ u` on the band.
    pub min_signed_second: f64,
    pub first_ok: bool,
    pub sign_ok: bool,
}

impl ThetaProfileCheck {
    pub fn passed(&self) -> bool {
        self.first_ok && self.sign_ok
    }
}

/// Checks that `∂_θ u` vanishes along `θ_k` and that `∂²_θ u` has the sign of
/// a maximum (even `k`, `ε > 0`) or saddle on `|φ − φ*| ≤ delta`.
pub fn check_theta_profile(
    result: &EigenSolveResult,
    k: usize,
    phi_star: f64,
    delta: f64,
) -> Result<ThetaProfileCheck> {
    let eps = result.shape.eps();
    if eps == 0.0 {
        return Err(Error::InvalidShape("theta profiles need eps != 0".into()));
    }
    let prof = theta_derivative_profile(result, k)?;
    let scale = result.field.max_abs();
    let ht = result.grid.htheta();
    let first_bound = 10.0 * (64.0 * f64::EPSILON + ht * ht) * scale;
    let max_first = prof.first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let even = k % 2 == 0;
    let expected_sign = if even == (eps > 0.0) { -1.0 } else { 1.0 };
    let band: Vec<f64> = prof
        .phi
        .iter()
        .zip(&prof.second)
        .filter(|(p, _)| (**p - phi_star).abs() <= delta)
        .map(|(_, s)| expected_sign * s)
        .collect();
    let min_signed_second = band.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ThetaProfileCheck {
        k,
        max_first,
        first_bound,
        expected_sign,
        band_nodes: band.len(),
        min_signed_second,
        first_ok: max_first <= first_bound,
        sign_ok: !band.is_empty() && min_signed_second > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bicubic_reproduces_separable_trig_polynomial() {
        let g = Grid2D::new(81, 64).unwrap();
        let f = Field2D::from_fn(&g, |i, j| g.phi(i).sin() * (2.0 + (2.0 * g.theta(j)).sin()));
        let b = BicubicField::new(&g, &f);
        let (phi, theta) = (1.234, 4.321);
        let jet = b.jet(phi, theta);
        let (sp, cp) = phi.sin_cos();
        let (s2, c2) = (2.0 * theta).sin_cos();
        assert!((jet.value - sp * (2.0 + s2)).abs() < 1e-5);
        assert!((jet.d_phi - cp * (2.0 + s2)).abs() < 1e-4);
        assert!((jet.d_theta - 2.0 * sp * c2).abs() < 1e-4);
        assert!((jet.d_phitheta - 2.0 * cp * c2).abs() < 1e-3);
        assert!((jet.d_thetatheta + 4.0 * sp * s2).abs() < 1e-2);
        // nodes are interpolated exactly
        let at = b.jet(g.phi(10), g.theta(7));
        assert!((at.value - f.get(10, 7)).abs() < 1e-15);
    }

    #[test]
    fn classification() {
        assert_eq!(classify([[-2.0, 0.0], [0.0, -1.0]]), CriticalKind::Maximum);
        assert_eq!(classify([[2.0, 0.0], [0.0, 1.0]]), CriticalKind::Minimum);
        assert_eq!(classify([[-2.0, 0.0], [0.0, 1.0]]), CriticalKind::Saddle);
        assert_eq!(classify([[1.0, 1.0], [1.0, 1.0]]), CriticalKind::Degenerate);
        assert_eq!(classify([[0.0, 0.0], [0.0, 0.0]]), CriticalKind::Degenerate);
    }

    #[test]
    fn synthetic_field_has_predicted_points() {
        // sin φ (1 + 0.1 sin(3θ)): maxima at θ = π/6 + 2πk/3, saddles in between
        let g = Grid2D::new(65, 72).unwrap();
        let f = Field2D::from_fn(&g, |i, j| g.phi(i).sin() * (1.0 + 0.1 * (3.0 * g.theta(j)).sin()));
        let s = find_critical_points_in(&g, &f, &MorseOptions::default()).unwrap();
        let pts = s.set.points();
        assert_eq!(pts.len(), 6);
        for (k, p) in pts.iter().enumerate() {
            assert!(circular_distance(p.theta, theta_k(3, k)) < 1e-10);
            assert!((p.phi - PI / 2.0).abs() < 1e-6);
            let kind = if k % 2 == 0 {
                CriticalKind::Maximum
            } else {
                CriticalKind::Saddle
            };
            assert_eq!(p.kind, kind);
        }
    }

    #[test]
    fn axisymmetric_field_is_a_circle() {
        let g = Grid2D::new(65, 32).unwrap();
        let f = Field2D::from_fn(&g, |i, _| g.phi(i).sin());
        match find_critical_points_in(&g, &f, &MorseOptions::default()).unwrap().set {
            CriticalSet::Circle { phi, fourier_power } => {
                assert!((phi - PI / 2.0).abs() < 1e-6);
                assert!(fourier_power < 1e-20);
            }
            other => panic!("expected a circle, got {other:?}"),
        }
    }

    #[test]
    fn circular_distance_wraps() {
        assert!((circular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(circular_distance(1.0, 1.0), 0.0);
    }
}
