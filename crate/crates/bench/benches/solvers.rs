use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qreg_bench::instance;
use qreg_core::randqr::inversion_counts;
use qreg_core::{brute_force_solve, qreg2d_solve, randqr_solve, Quantile};

fn planar(c: &mut Criterion) {
    let tau = Quantile::new(0.5).unwrap();
    let mut group = c.benchmark_group("planar");
    group.sample_size(10);
    for n in [1 << 10, 1 << 12, 1 << 14] {
        let ds = instance(n, 2, n as u64);
        group.bench_with_input(BenchmarkId::new("kset", n), &ds, |b, ds| {
            b.iter(|| qreg2d_solve(ds, tau).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("randqr", n), &ds, |b, ds| {
            b.iter(|| randqr_solve(ds, tau, 1).unwrap())
        });
    }
    let ds = instance(256, 2, 256);
    group.bench_function("oracle/256", |b| b.iter(|| brute_force_solve(&ds, tau).unwrap()));
    group.finish();
}

fn spatial(c: &mut Criterion) {
    let tau = Quantile::new(0.5).unwrap();
    let mut group = c.benchmark_group("spatial");
    group.sample_size(10);
    for n in [64, 128] {
        let ds = instance(n, 3, n as u64);
        group.bench_with_input(BenchmarkId::new("randqr", n), &ds, |b, ds| {
            b.iter(|| randqr_solve(ds, tau, 1).unwrap())
        });
    }
    group.finish();
}

fn inversions(c: &mut Criterion) {
    let n = 1 << 16;
    let start: Vec<usize> = (0..n).collect();
    // fixed scrambled permutation
    let mut end: Vec<usize> = (0..n).map(|i| (i * 40503) % n).collect();
    end.rotate_left(n / 3);
    c.bench_function("inversions/65536", |b| b.iter(|| inversion_counts(&start, &end).unwrap()));
}

criterion_group!(benches, planar, spatial, inversions);
criterion_main!(benches);
