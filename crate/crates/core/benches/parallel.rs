use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use halftorus::linalg::InverseIterOptions;
use halftorus::morse::{find_critical_points, MorseOptions};
use halftorus::perturbation::eigenvalue_stationarity;
use halftorus::spectral2d::{assemble_lb_with, solve_principal_2d};
use halftorus::{Execution, Grid2D, TorusShape};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn shape() -> TorusShape {
    TorusShape::new(2.0, 1.0, 0.05, 3).unwrap()
}

fn spmv(c: &mut Criterion) {
    let mut group = c.benchmark_group("spmv");
    for &(nphi, ntheta) in &[(201, 48), (401, 72), (801, 144)] {
        let g = Grid2D::new(nphi, ntheta).unwrap();
        let (a, _) = assemble_lb_with(&shape(), &g, Execution::Sequential);
        let x: Vec<f64> = (0..a.dim()).map(|i| 1.0 + (i % 7) as f64).collect();
        let mut y = vec![0.0; a.dim()];
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, a.dim()), &exec, |b, &exec| {
                b.iter(|| {
                    a.spmv_into(black_box(&x), &mut y, exec);
                    black_box(y[0])
                })
            });
        }
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    let g = Grid2D::new(401, 72).unwrap();
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| assemble_lb_with(black_box(&shape()), &g, exec)));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("eps_sweep");
    group.sample_size(10);
    let g = Grid2D::new(101, 24).unwrap();
    let base = TorusShape::unperturbed(2.0, 1.0).unwrap();
    for (name, exec) in POLICIES {
        let opts = InverseIterOptions {
            exec,
            ..Default::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| eigenvalue_stationarity(&base, 3, black_box(&[0.04, 0.02, 0.01]), &g, &opts).unwrap())
        });
    }
    group.finish();
}

fn critical_points(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_points");
    group.sample_size(20);
    let res = solve_principal_2d(&shape(), &Grid2D::new(401, 72).unwrap(), &InverseIterOptions::default()).unwrap();
    for (name, exec) in POLICIES {
        let opts = MorseOptions {
            exec,
            ..Default::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| find_critical_points(black_box(&res), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spmv, assembly, sweep, critical_points);
criterion_main!(benches);
