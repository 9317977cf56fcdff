use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modheat_bench::{cayley_laplacian, symmetric_range};
use modheat_core::graph::heat_series;
use modheat_core::kernel::{kernel_gamma_many, kernel_transfer_many};
use modheat_core::linalg::symmetric_eigenvalues;
use modheat_core::spectral::completeness_entries;
use modheat_core::{LineWindow, PrefactorReading};

fn closed_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    for r in [4i64, 16] {
        let ns = symmetric_range(r);
        g.bench_with_input(BenchmarkId::new("gamma", r), &ns, |b, ns| {
            b.iter(|| kernel_gamma_many(black_box(1.0), ns, 1e-10, PrefactorReading::FiberNormalized).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("transfer", r), &ns, |b, ns| {
            b.iter(|| kernel_transfer_many(black_box(1.0), ns, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn completeness(c: &mut Criterion) {
    let pairs: Vec<(i64, i64)> = (-3..=3).flat_map(|i| (-3..=3).map(move |j| (i, j))).collect();
    c.bench_function("completeness_7x7", |b| {
        b.iter(|| completeness_entries(black_box(&pairs), 1e-10).unwrap())
    });
}

fn series(c: &mut Criterion) {
    let g = LineWindow::symmetric(80).unwrap().graph().unwrap();
    c.bench_function("heat_series_line80", |b| {
        b.iter(|| heat_series(&g, &0, black_box(2.0), 65).unwrap())
    });
}

fn jacobi(c: &mut Criterion) {
    let mut g = c.benchmark_group("jacobi");
    g.sample_size(10);
    for p in [5u32, 7] {
        let m = cayley_laplacian(p);
        g.bench_with_input(BenchmarkId::from_parameter(p), &m, |b, m| {
            b.iter(|| symmetric_eigenvalues(m, 1e-11).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, closed_form, completeness, series, jacobi);
criterion_main!(benches);
