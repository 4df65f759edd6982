use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ocp2d_bench::{gram_matrix, lattice, scale};
use ocp2d_core::freeenergy::{log_z_pinned, KernelMode};
use ocp2d_core::kernel::{kernel_matrix, GinibreKernel};
use ocp2d_core::numerics::hermitian_logdet;
use ocp2d_core::oracle::mc_partition;
use ocp2d_core::Complex64;
use std::hint::black_box;

fn logdet(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_logdet");
    for m in [16, 64, 128] {
        let matrix = gram_matrix(4.0 * m as f64, m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &matrix, |b, matrix| {
            b.iter(|| hermitian_logdet(black_box(matrix)).unwrap())
        });
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_matrix");
    for m in [8, 32] {
        let n = 400.0;
        let points = lattice(n, m, Complex64::new(0.1, 0.0)).effective_points();
        let finite = GinibreKernel::finite(scale(n), 400 + m - 1);
        group.bench_with_input(BenchmarkId::new("finite", m), &points, |b, points| {
            b.iter(|| kernel_matrix(&finite, black_box(points)).unwrap())
        });
    }
    group.finish();
}

fn pinned(c: &mut Criterion) {
    let mut group = c.benchmark_group("log_z_pinned");
    for n in [100.0, 400.0] {
        let m = (0.02 * n) as usize;
        let clusters = vec![lattice(n, m, Complex64::new(0.0, 0.0))];
        group.bench_with_input(BenchmarkId::from_parameter(n), &clusters, |b, clusters| {
            b.iter(|| log_z_pinned(black_box(clusters), scale(n), KernelMode::Finite).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let clusters = vec![lattice(2.0, 1, Complex64::new(0.0, 0.0))];
    c.bench_function("mc_partition/n2/100k", |b| {
        b.iter(|| mc_partition(2, black_box(&clusters), scale(2.0), 100_000, 1).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = logdet, kernel, pinned, monte_carlo
}
criterion_main!(benches);
