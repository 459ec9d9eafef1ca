use std::f64::consts::PI;

use halftorus::linalg::InverseIterOptions;
use halftorus::morse::{circular_distance, find_critical_points, verify_theorem, MorseOptions, VerifyOptions};
use halftorus::perturbation::min_mode_threshold;
use halftorus::radial::solve_radial;
use halftorus::spectral2d::{assemble_lb, solve_principal_2d};
use halftorus::{CriticalPoint, Grid2D, RadialGrid, TorusShape};
use proptest::prelude::*;

fn points(shape: &TorusShape, nphi: usize, ntheta: usize) -> Vec<CriticalPoint> {
    let res = solve_principal_2d(
        shape,
        &Grid2D::new(nphi, ntheta).unwrap(),
        &InverseIterOptions::default(),
    )
    .unwrap();
    find_critical_points(&res, &MorseOptions::default())
        .unwrap()
        .set
        .points()
        .to_vec()
}

#[test]
fn critical_points_are_interior_and_mirror_paired() {
    let n = 3;
    let pts = points(&TorusShape::new(2.0, 1.0, 0.05, n).unwrap(), 201, 72);
    assert_eq!(pts.len(), 6);
    for p in &pts {
        assert!(p.phi > 0.0 && p.phi < PI);
        let mirror = (PI / n as f64 - p.theta).rem_euclid(2.0 * PI);
        let m = pts
            .iter()
            .min_by(|a, b| {
                circular_distance(a.theta, mirror)
                    .partial_cmp(&circular_distance(b.theta, mirror))
                    .unwrap()
            })
            .unwrap();
        assert!(circular_distance(m.theta, mirror) < 1e-9);
        assert!((m.phi - p.phi).abs() < 1e-9);
        assert_eq!(m.kind, p.kind);
    }
}

#[test]
fn count_is_stable_under_refinement() {
    let shape = TorusShape::new(2.0, 1.0, 0.05, 3).unwrap();
    let levels = [(101, 36), (201, 72), (401, 144)];
    let sets: Vec<Vec<CriticalPoint>> = levels.iter().map(|&(a, b)| points(&shape, a, b)).collect();
    assert!(sets.iter().all(|s| s.len() == 6));
    let d = |a: &[CriticalPoint], b: &[CriticalPoint]| {
        a.iter()
            .zip(b)
            .map(|(p, q)| (p.phi - q.phi).abs().max(circular_distance(p.theta, q.theta)))
            .fold(0.0f64, f64::max)
    };
    let coarse = d(&sets[0], &sets[1]);
    let fine = d(&sets[1], &sets[2]);
    // locations converge: differences shrink roughly fourfold per halving
    assert!(fine < coarse / 2.5 || fine < 1e-8, "{coarse} {fine}");
}

#[test]
fn phi_deviation_shrinks_with_eps() {
    let pair = solve_radial(
        &TorusShape::unperturbed(2.0, 1.0).unwrap(),
        &RadialGrid::new(201).unwrap(),
        &InverseIterOptions::default(),
    )
    .unwrap();
    let mut last = f64::INFINITY;
    for eps in [0.08, 0.04, 0.02, 0.01] {
        let pts = points(&TorusShape::new(2.0, 1.0, eps, 3).unwrap(), 201, 72);
        let rep = verify_theorem(&pts, eps, 3, &pair, &VerifyOptions::default()).unwrap();
        assert!(rep.count_ok);
        assert!(
            rep.max_phi_deviation < last,
            "eps {eps}: {} !< {last}",
            rep.max_phi_deviation
        );
        last = rep.max_phi_deviation;
    }
}

fn shape_strategy() -> impl Strategy<Value = (f64, f64, f64, u32)> {
    (1.5f64..6.0, 0.3f64..1.0, -0.05f64..0.05, 0u32..3).prop_map(|(ratio, r, e, k)| (ratio * r + r, r, e * r, k))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn assembly_symmetric_and_solution_positive((big_r, r, eps, k) in shape_strategy()) {
        let base = TorusShape::unperturbed(big_r, r).unwrap();
        let pair = solve_radial(&base, &RadialGrid::new(41).unwrap(), &InverseIterOptions::default()).unwrap();
        let n = min_mode_threshold(&base, pair.lambda1).unwrap() + k;
        let shape = TorusShape::new(big_r, r, eps, n).unwrap();
        let grid = Grid2D::new(33, Grid2D::auto_ntheta(n)).unwrap();
        let (a, _) = assemble_lb(&shape, &grid);
        prop_assert_eq!(a.max_asymmetry(), 0.0);
        let res = solve_principal_2d(&shape, &grid, &InverseIterOptions::default()).unwrap();
        prop_assert!(res.field.interior().iter().all(|&v| v > 0.0));
        prop_assert!((res.surface_norm_sq() - 1.0).abs() < 1e-10);
        prop_assert!(res.lambda1_eps > 0.0);
    }

    #[test]
    fn eps_flip_is_a_quarter_period_shift((big_r, r, eps, k) in shape_strategy()) {
        let n = 2 + k;
        let grid = Grid2D::new(25, 4 * n as usize * 4).unwrap();
        let opts = InverseIterOptions::default();
        let plus = solve_principal_2d(&TorusShape::new(big_r, r, eps, n).unwrap(), &grid, &opts).unwrap();
        let minus = solve_principal_2d(&TorusShape::new(big_r, r, -eps, n).unwrap(), &grid, &opts).unwrap();
        prop_assert!((plus.lambda1_eps - minus.lambda1_eps).abs() <= 1e-10 * plus.lambda1_eps);
        let shift = grid.ntheta() / (2 * n as usize);
        prop_assert!(minus.field.max_abs_diff(&plus.shifted(shift)) < 1e-9);
    }

    #[test]
    fn radial_pair_is_normalised_with_interior_ridge((big_r, r, _e, _k) in shape_strategy()) {
        let base = TorusShape::unperturbed(big_r, r).unwrap();
        let pair = solve_radial(&base, &RadialGrid::new(81).unwrap(), &InverseIterOptions::default()).unwrap();
        prop_assert!((pair.surface_norm_sq() - 1.0).abs() < 1e-12);
        prop_assert!(pair.phi_star > PI / 2.0 && pair.phi_star < PI);
        prop_assert!(pair.uprime0 > 0.0 && pair.uprime_pi < 0.0);
    }
}
