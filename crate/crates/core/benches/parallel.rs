use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use torus_breakup::diophantine::{find_resonances_with, FrequencyVector};
use torus_breakup::exec::{map_slice, max_range, ExecMode};
use torus_breakup::trigpoly::{bump, jackson};
use torus_breakup::variational::pendulum_bvp;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn resonance_search(c: &mut Criterion) {
    let omega = FrequencyVector::spread(3).unwrap();
    let mut group = c.benchmark_group("resonance_search");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 40), &mode, |b, &mode| {
            b.iter(|| find_resonances_with(black_box(&omega), 40, 1.0, mode))
        });
    }
    group.finish();
}

fn sup_error_grid(c: &mut Criterion) {
    let f = bump(1.0).unwrap();
    let p = jackson(&f, 64, 4).unwrap().poly;
    let n = 1 << 14;
    let h = 2.0 * PI / n as f64;
    let mut group = c.benchmark_group("sup_error_grid");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, n), &mode, |b, &mode| {
            b.iter(|| {
                max_range(mode, n, |j| {
                    let x = -PI + h * j as f64;
                    (f.eval(x) - p.eval(&[x])).abs()
                })
            })
        });
    }
    group.finish();
}

fn pendulum_profile(c: &mut Criterion) {
    let grid: Vec<f64> = (1..=16).map(|i| 10.0 * i as f64 / 17.0).collect();
    let mut group = c.benchmark_group("pendulum_profile");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, grid.len()), &mode, |b, &mode| {
            b.iter(|| {
                map_slice(mode, &grid, |&s| {
                    let first = pendulum_bvp(1.0, 0.0, PI, 0.0, s).unwrap();
                    let second = pendulum_bvp(1.0, PI, 2.0 * PI, s, 10.0).unwrap();
                    first.action + second.action
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, resonance_search, sup_error_grid, pendulum_profile);
criterion_main!(benches);
