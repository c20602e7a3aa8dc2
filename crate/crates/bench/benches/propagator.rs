use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dho_bench::generator;
use dho_core::finite_dilation::dilate_propagator;

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    for n in [1, 4, 16] {
        let g = generator(n, 1.0, 0.5);
        group.bench_with_input(BenchmarkId::new("closed_form", n), &g, |b, g| {
            b.iter(|| g.evolve_closed_form(black_box(1.3)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("oracle", n), &g, |b, g| {
            b.iter(|| g.evolve_oracle(black_box(1.3)).unwrap())
        });
    }
    group.finish();
}

fn dilation(c: &mut Criterion) {
    let mut group = c.benchmark_group("dilation");
    for n in [1, 4, 8] {
        let g = generator(n, 1.0, 0.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| dilate_propagator(g, black_box(1.0)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, propagator, dilation);
criterion_main!(benches);
