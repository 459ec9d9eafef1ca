//! Parameterised half tori and their intrinsic geometry.
//!
//! Coordinates are `(φ, θ) ∈ [0, π] × S¹`. The tube radius is
//! `r_ε(θ) = r + ε sin(nθ)`; with `ε = 0` the surface is the upper half of the
//! standard torus. The metric is diagonal in these coordinates,
//!
//! ```text
//! g11 = r_ε²,   g22 = (R + r_ε cos φ)² + r_ε′²,   √|g| = r_ε Φ,
//! ```
//!
//! with `Φ = √g22`, and the Laplace–Beltrami operator expands to
//! `a_φφ u_φφ + a_θθ u_θθ + a_φ u_φ + a_θ u_θ`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Geometry parameters `(R, r, ε, n)` of a perturbed half torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusShape {
    major_radius: f64,
    minor_radius: f64,
    eps: f64,
    mode: u32,
}

/// Tube radius and its first two θ-derivatives at one angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeProfile {
    pub radius: f64,
    pub slope: f64,
    pub curvature: f64,
}

/// Metric components and Laplace–Beltrami coefficients at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricAt {
    pub g11: f64,
    pub g22: f64,
    pub sqrt_det: f64,
    /// Coefficient of `u_φ`.
    pub phi_coeff: f64,
    /// Coefficient of `u_θ`.
    pub theta_coeff: f64,
    /// Coefficient of `u_φφ`.
    pub phi2_coeff: f64,
    /// Coefficient of `u_θθ`.
    pub theta2_coeff: f64,
}

impl TorusShape {
    pub fn new(major_radius: f64, minor_radius: f64, eps: f64, mode: u32) -> Result<Self> {
        if !(major_radius.is_finite() && minor_radius.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidShape("parameters must be finite".into()));
        }
        if !(minor_radius > 0.0) {
            return Err(Error::InvalidShape(format!("r = {minor_radius} must be positive")));
        }
        if !(major_radius > minor_radius) {
            return Err(Error::InvalidShape(format!(
                "R = {major_radius} must exceed r = {minor_radius}"
            )));
        }
        if !(major_radius > minor_radius + eps.abs()) {
            return Err(Error::InvalidShape(format!(
                "R = {major_radius} must exceed r + |eps| = {}",
                minor_radius + eps.abs()
            )));
        }
        if eps.abs() >= minor_radius {
            return Err(Error::InvalidShape(format!(
                "|eps| = {} must be smaller than r = {minor_radius}",
                eps.abs()
            )));
        }
        if mode == 0 {
            return Err(Error::InvalidShape("mode n must be at least 1".into()));
        }
        Ok(Self {
            major_radius,
            minor_radius,
            eps,
            mode,
        })
    }

    /// The unperturbed half torus (ε = 0, n = 1).
    pub fn unperturbed(major_radius: f64, minor_radius: f64) -> Result<Self> {
        Self::new(major_radius, minor_radius, 0.0, 1)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.major_radius, self.minor_radius, eps, self.mode)
    }

    pub fn with_mode(&self, mode: u32) -> Result<Self> {
        Self::new(self.major_radius, self.minor_radius, self.eps, mode)
    }

    pub fn major_radius(&self) -> f64 {
        self.major_radius
    }

    pub fn minor_radius(&self) -> f64 {
        self.minor_radius
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.eps == 0.0
    }

    /// `r_ε(θ)`, `r_ε′(θ)` and `r_ε″(θ)` at a floating-point angle.
    pub fn tube(&self, theta: f64) -> TubeProfile {
        let n = f64::from(self.mode);
        let (s, c) = (n * theta).sin_cos();
        self.tube_from_sin_cos(s, c)
    }

    /// Tube profile at `θ = 2πk/m`.
    ///
    /// The angle `nθ` is reduced in exact integer arithmetic, so the discrete
    /// mirror (`θ ↦ π/n − θ`) and translation (`θ ↦ θ + π/n`) symmetries hold
    /// bit-for-bit on grids that contain them.
    pub fn tube_at_turn(&self, k: i64, m: i64) -> TubeProfile {
        let (s, c) = sin_cos_turns(k * i64::from(self.mode), m);
        self.tube_from_sin_cos(s, c)
    }

    fn tube_from_sin_cos(&self, s: f64, c: f64) -> TubeProfile {
        let n = f64::from(self.mode);
        TubeProfile {
            radius: self.minor_radius + self.eps * s,
            slope: self.eps * n * c,
            curvature: -self.eps * n * n * s,
        }
    }

    /// Point of the embedded surface.
    pub fn embed(&self, phi: f64, theta: f64) -> Result<[f64; 3]> {
        check_phi(phi)?;
        let theta = canonical_theta(theta)?;
        let rho = self.tube(theta).radius;
        // sin is evaluated as 0 exactly at the boundary circles
        let sin_phi = if phi == 0.0 || phi == PI { 0.0 } else { phi.sin() };
        let radial = self.major_radius + rho * phi.cos();
        Ok([radial * theta.cos(), radial * theta.sin(), rho * sin_phi])
    }

    pub fn metric_at(&self, phi: f64, theta: f64) -> MetricAt {
        let theta = theta.rem_euclid(TAU);
        let (sin_phi, cos_phi) = phi.sin_cos();
        self.metric_with(cos_phi, sin_phi, self.tube(theta))
    }

    /// Metric from a precomputed `cos φ`, `sin φ` and tube profile.
    pub fn metric_with(&self, cos_phi: f64, sin_phi: f64, tube: TubeProfile) -> MetricAt {
        let rho = tube.radius;
        let rho_p = tube.slope;
        let ring = self.major_radius + rho * cos_phi;
        let g11 = rho * rho;
        let g22 = ring * ring + rho_p * rho_p;
        let big_phi = g22.sqrt();
        let big_phi_phi = -ring * rho * sin_phi / big_phi;
        let big_phi_theta = (ring * rho_p * cos_phi + rho_p * tube.curvature) / big_phi;
        MetricAt {
            g11,
            g22,
            sqrt_det: rho * big_phi,
            phi_coeff: big_phi_phi / (g11 * big_phi),
            theta_coeff: (rho_p * big_phi - rho * big_phi_theta) / (rho * g22 * big_phi),
            phi2_coeff: 1.0 / g11,
            theta2_coeff: 1.0 / g22,
        }
    }

    /// Inverse metric diagonal `(1/g11, 1/g22)`.
    pub fn gradient_weights(&self, phi: f64, theta: f64) -> (f64, f64) {
        let m = self.metric_at(phi, theta);
        (1.0 / m.g11, 1.0 / m.g22)
    }

    /// `g^{ij} ∂_i u ∂_j u`.
    pub fn riemannian_grad_norm_sq(&self, phi: f64, theta: f64, du_dphi: f64, du_dtheta: f64) -> f64 {
        let (w_phi, w_theta) = self.gradient_weights(phi, theta);
        w_phi * du_dphi * du_dphi + w_theta * du_dtheta * du_dtheta
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::AngleOutOfRange {
            name: "phi",
            value: phi,
        });
    }
    Ok(())
}

/// Maps θ into `[0, 2π)`, rejecting non-finite input.
pub fn canonical_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::AngleOutOfRange {
            name: "theta",
            value: theta,
        });
    }
    let t = theta.rem_euclid(TAU);
    Ok(if t >= TAU { 0.0 } else { t })
}

/// `(sin, cos)` of `2πk/m`, reduced to the first octant in integer arithmetic.
///
/// Results satisfy `f(m/2 − k) = (s, −c)` and `f(k + m/2) = (−s, −c)` exactly
/// whenever those arguments are integers.
pub fn sin_cos_turns(k: i64, m: i64) -> (f64, f64) {
    assert!(m > 0, "turn denominator must be positive");
    // work in units of 1/(8m) of a full turn, octant width m
    let full = 8 * m;
    let mut t = (8 * k).rem_euclid(full);
    let mut sin_sign = 1.0;
    let mut cos_sign = 1.0;
    if t >= 4 * m {
        t -= 4 * m;
        sin_sign = -sin_sign;
        cos_sign = -cos_sign;
    }
    if t > 2 * m {
        t = 4 * m - t;
        cos_sign = -cos_sign;
    }
    let (s, c) = if t > m {
        let y = 2 * m - t;
        let (s, c) = octant_sin_cos(y, m);
        (c, s)
    } else {
        octant_sin_cos(t, m)
    };
    (sin_sign * s, cos_sign * c)
}

fn octant_sin_cos(t: i64, m: i64) -> (f64, f64) {
    if t == 0 {
        return (0.0, 1.0);
    }
    (PI * t as f64 / (4 * m) as f64).sin_cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn shape_validation() {
        assert!(TorusShape::new(2.0, 1.0, 0.0, 1).is_ok());
        assert!(TorusShape::new(1.0, 1.0, 0.0, 1).is_err());
        assert!(TorusShape::new(2.0, 0.0, 0.0, 1).is_err());
        assert!(TorusShape::new(2.0, 1.0, 1.0, 3).is_err());
        assert!(TorusShape::new(2.0, 1.0, -1.0, 3).is_err());
        assert!(TorusShape::new(2.0, 1.0, 0.1, 0).is_err());
        assert!(TorusShape::new(f64::NAN, 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn embed_examples() {
        let s = TorusShape::new(2.0, 1.0, 0.0, 1).unwrap();
        let p = s.embed(PI / 2.0, 0.0).unwrap();
        assert!(close(p[0], 2.0, 1e-15) && p[1].abs() < 1e-15 && close(p[2], 1.0, 1e-15));
        let p = s.embed(0.0, PI).unwrap();
        assert!(close(p[0], -3.0, 1e-15) && p[1].abs() < 1e-15 && p[2] == 0.0);

        // r_ε(π/2) = 1 + 0.1 sin(3π/2) = 0.9, worked by hand
        let s = TorusShape::new(2.0, 1.0, 0.1, 3).unwrap();
        let p = s.embed(PI / 2.0, PI / 2.0).unwrap();
        assert!(p[0].abs() < 1e-14);
        assert!(close(p[1], 2.0, 1e-14));
        assert!(close(p[2], 0.9, 1e-14));
    }

    #[test]
    fn embed_rejects_out_of_range() {
        let s = TorusShape::new(2.0, 1.0, 0.0, 1).unwrap();
        assert!(s.embed(-0.1, 0.0).is_err());
        assert!(s.embed(PI + 1e-9, 0.0).is_err());
        assert!(s.embed(1.0, f64::INFINITY).is_err());
        // θ is periodic and canonicalised
        let a = s.embed(1.0, 0.5).unwrap();
        let b = s.embed(1.0, 0.5 + TAU).unwrap();
        for i in 0..3 {
            assert!(close(a[i], b[i], 1e-14));
        }
    }

    #[test]
    fn boundary_has_zero_height() {
        let s = TorusShape::new(2.0, 1.0, 0.3, 4).unwrap();
        for j in 0..50 {
            let th = j as f64 * 0.1;
            assert_eq!(s.embed(0.0, th).unwrap()[2], 0.0);
            assert_eq!(s.embed(PI, th).unwrap()[2], 0.0);
            assert!(s.embed(1.3, th).unwrap()[2] > 0.0);
        }
    }

    #[test]
    fn metric_examples() {
        let s = TorusShape::new(2.0, 1.0, 0.0, 1).unwrap();
        let m = s.metric_at(0.0, 0.7);
        assert!(close(m.g11, 1.0, 1e-15));
        assert!(close(m.g22, 9.0, 1e-15));
        assert!(m.phi_coeff.abs() < 1e-15);
        assert_eq!(m.theta_coeff, 0.0);

        let s = TorusShape::new(2.0, 1.0, 0.1, 3).unwrap();
        let m = s.metric_at(PI, PI / 2.0);
        assert!(close(m.g11, 0.81, 1e-14));
        assert!(close(m.g22, 1.21, 1e-14));

        let m = s.metric_at(0.0, 0.0);
        assert!(close(m.g11, 1.0, 1e-15));
        assert!(close(m.g22, 9.09, 1e-14));
        let (wp, wt) = s.gradient_weights(0.0, 0.0);
        assert!(close(wp, 1.0, 1e-15));
        assert!(close(wt, 1.0 / 9.09, 1e-14));
    }

    /// Metric recovered from central differences of the embedding.
    fn fd_metric(s: &TorusShape, phi: f64, theta: f64) -> (f64, f64, f64) {
        let h = 1e-5;
        let d = |a: [f64; 3], b: [f64; 3]| {
            [
                (a[0] - b[0]) / (2.0 * h),
                (a[1] - b[1]) / (2.0 * h),
                (a[2] - b[2]) / (2.0 * h),
            ]
        };
        let xp = d(s.embed(phi + h, theta).unwrap(), s.embed(phi - h, theta).unwrap());
        let xt = d(s.embed(phi, theta + h).unwrap(), s.embed(phi, theta - h).unwrap());
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        (dot(xp, xp), dot(xt, xt), dot(xp, xt))
    }

    #[test]
    fn metric_matches_embedding_differences() {
        let s = TorusShape::new(2.0, 1.0, 0.1, 3).unwrap();
        let (g11, g22, g12) = fd_metric(&s, 1e-3 + 1e-5, 0.0);
        let m = s.metric_at(1e-3 + 1e-5, 0.0);
        assert!(close(g11, m.g11, 1e-8));
        assert!(close(g22, m.g22, 1e-8));
        assert!(g12.abs() < 1e-8);
        for &(phi, th) in &[(0.4, 0.3), (1.7, 2.9), (2.9, 5.5)] {
            let (g11, g22, g12) = fd_metric(&s, phi, th);
            let m = s.metric_at(phi, th);
            assert!(close(g11, m.g11, 1e-8), "{g11} vs {}", m.g11);
            assert!(close(g22, m.g22, 1e-8), "{g22} vs {}", m.g22);
            assert!(g12.abs() < 1e-8);
        }
    }

    /// The expanded coefficients reproduce the divergence form
    /// `(1/√g)[∂_φ(√g g^{11} u_φ) + ∂_θ(√g g^{22} u_θ)]` on a test function.
    #[test]
    fn lb_coefficients_match_divergence_form() {
        let s = TorusShape::new(2.0, 1.0, 0.2, 2).unwrap();
        let u = |p: f64, t: f64| p.sin() * (1.0 + 0.3 * (t + 0.2).cos()) + 0.1 * (2.0 * t).sin() * p;
        let h = 1e-4;
        let flux_phi = |p: f64, t: f64| {
            let m = s.metric_at(p, t);
            m.sqrt_det / m.g11 * (u(p + h, t) - u(p - h, t)) / (2.0 * h)
        };
        let flux_theta = |p: f64, t: f64| {
            let m = s.metric_at(p, t);
            m.sqrt_det / m.g22 * (u(p, t + h) - u(p, t - h)) / (2.0 * h)
        };
        for &(p, t) in &[(0.7, 0.4), (1.9, 3.3), (2.5, 5.0)] {
            let m = s.metric_at(p, t);
            let div = ((flux_phi(p + h, t) - flux_phi(p - h, t)) / (2.0 * h)
                + (flux_theta(p, t + h) - flux_theta(p, t - h)) / (2.0 * h))
                / m.sqrt_det;
            let up = (u(p + h, t) - u(p - h, t)) / (2.0 * h);
            let ut = (u(p, t + h) - u(p, t - h)) / (2.0 * h);
            let upp = (u(p + h, t) - 2.0 * u(p, t) + u(p - h, t)) / (h * h);
            let utt = (u(p, t + h) - 2.0 * u(p, t) + u(p, t - h)) / (h * h);
            let expanded = m.phi2_coeff * upp + m.theta2_coeff * utt + m.phi_coeff * up + m.theta_coeff * ut;
            assert!((div - expanded).abs() < 1e-5, "{div} vs {expanded}");
        }
    }

    #[test]
    fn grad_norm_examples() {
        let s = TorusShape::new(2.0, 1.0, 0.0, 1).unwrap();
        assert_eq!(s.riemannian_grad_norm_sq(1.0, 2.0, 0.0, 0.0), 0.0);
        assert!(close(s.riemannian_grad_norm_sq(1.0, 2.0, 1.0, 0.0), 1.0, 1e-15));
        assert!(close(s.riemannian_grad_norm_sq(PI / 2.0, 0.0, 1.0, 1.0), 1.25, 1e-15));
        let (_, wt) = s.gradient_weights(PI, 0.3);
        assert!(close(wt, 1.0, 1e-15));
    }

    #[test]
    fn turns_are_exactly_symmetric() {
        for &m in &[16i64, 24, 64, 72, 144, 160] {
            for k in 0..m {
                let (s, c) = sin_cos_turns(k, m);
                let x = TAU * k as f64 / m as f64;
                assert!((s - x.sin()).abs() < 1e-15 && (c - x.cos()).abs() < 1e-15);
                if m % 2 == 0 {
                    let (s2, c2) = sin_cos_turns(m / 2 - k, m);
                    assert_eq!(s2, s);
                    assert_eq!(c2, -c);
                    let (s3, c3) = sin_cos_turns(k + m / 2, m);
                    assert_eq!(s3, -s);
                    assert_eq!(c3, -c);
                }
            }
        }
    }

    #[test]
    fn eps_flip_is_exact_on_turns() {
        let plus = TorusShape::new(2.0, 1.0, 0.07, 3).unwrap();
        let minus = plus.with_eps(-0.07).unwrap();
        let m = 2 * 72;
        let shift = m / 6; // π/n with n = 3
        for k in 0..m {
            let a = plus.tube_at_turn(k, m);
            let b = minus.tube_at_turn(k + shift, m);
            assert_eq!(a.radius, b.radius);
            assert_eq!(a.slope, b.slope);
            for &phi in &[0.3f64, 1.1, 2.8] {
                let (sp, cp) = phi.sin_cos();
                assert_eq!(plus.metric_with(cp, sp, a), minus.metric_with(cp, sp, b));
            }
        }
    }

    #[test]
    fn tube_slope_matches_central_differences() {
        let s = TorusShape::new(2.0, 1.0, 0.1, 5).unwrap();
        let mut prev = f64::INFINITY;
        for &h in &[1e-2, 5e-3, 2.5e-3] {
            let t = 0.37;
            let fd = (s.tube(t + h).radius - s.tube(t - h).radius) / (2.0 * h);
            let err = (fd - s.tube(t).slope).abs();
            assert!(err < 0.3 * prev, "halving h should cut the error by about 4");
            prev = err;
        }
    }

    fn shape_strategy() -> impl Strategy<Value = TorusShape> {
        (1.05f64..5.0, 0.1f64..1.0, -0.9f64..0.9, 1u32..8).prop_filter_map("admissible", |(ratio, r, e, n)| {
            let big_r = r * (1.0 + ratio);
            TorusShape::new(big_r, r, e * r * ratio.min(1.0) * 0.99, n).ok()
        })
    }

    proptest! {
        #[test]
        fn metric_positive_and_det_consistent(s in shape_strategy(), phi in 0.0f64..PI, theta in 0.0f64..TAU) {
            let m = s.metric_at(phi, theta);
            prop_assert!(m.g11 > 0.0 && m.g22 > 0.0);
            let expect = (m.g11 * m.g22).sqrt();
            prop_assert!((m.sqrt_det - expect).abs() <= 1e-14 * expect);
        }

        #[test]
        fn unperturbed_reduction(r in 0.1f64..1.0, ratio in 1.05f64..5.0, phi in 0.0f64..PI, theta in 0.0f64..TAU, n in 1u32..6) {
            let big_r = r * ratio;
            let s = TorusShape::new(big_r, r, 0.0, n).unwrap();
            let m = s.metric_at(phi, theta);
            let ring = big_r + r * phi.cos();
            prop_assert!((m.g11 - r * r).abs() <= 1e-15 * r * r);
            prop_assert!((m.g22 - ring * ring).abs() <= 1e-14 * ring * ring);
            prop_assert_eq!(m.theta_coeff, 0.0);
            let a_phi = -phi.sin() / (r * ring);
            prop_assert!((m.phi_coeff - a_phi).abs() <= 1e-13 * (1.0 + a_phi.abs()));
        }

        #[test]
        fn mirror_symmetry(s in shape_strategy(), phi in 0.0f64..PI, theta in 0.0f64..TAU) {
            let n = f64::from(s.mode());
            let a = s.metric_at(phi, theta);
            let b = s.metric_at(phi, PI / n - theta);
            prop_assert!((a.g11 - b.g11).abs() <= 1e-12 * a.g11);
            prop_assert!((a.g22 - b.g22).abs() <= 1e-12 * a.g22);
            prop_assert!((a.sqrt_det - b.sqrt_det).abs() <= 1e-12 * a.sqrt_det);
            prop_assert!((a.theta_coeff + b.theta_coeff).abs() <= 1e-11 * (1.0 + a.theta_coeff.abs()));
            prop_assert!((s.tube(theta).slope + s.tube(PI / n - theta).slope).abs() <= 1e-12);
        }

        #[test]
        fn eps_flip_symmetry(s in shape_strategy(), phi in 0.0f64..PI, theta in 0.0f64..TAU) {
            let n = f64::from(s.mode());
            let flipped = s.with_eps(-s.eps()).unwrap();
            let a = s.metric_at(phi, theta);
            let b = flipped.metric_at(phi, theta + PI / n);
            prop_assert!((a.g11 - b.g11).abs() <= 1e-12 * a.g11);
            prop_assert!((a.g22 - b.g22).abs() <= 1e-12 * a.g22);
            prop_assert!((a.phi_coeff - b.phi_coeff).abs() <= 1e-12 * (1.0 + a.phi_coeff.abs()));
        }
    }
}
