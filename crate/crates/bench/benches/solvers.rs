use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sslsq_bench::{two_cluster, two_cluster_with};
use sslsq_core::diagnostics::brute_force_hard_minimum;
use sslsq_core::{fit_hard, fit_soft, ridge_solve, ClassEncoding, SolverConfig};

fn ridge(c: &mut Criterion) {
    let data = two_cluster(1);
    let x = data.extended_features();
    let y = nalgebra::DVector::from_fn(x.nrows(), |i, _| (i % 2) as f64);
    c.bench_function("ridge_solve 400x2", |b| {
        b.iter(|| ridge_solve(black_box(&x), black_box(&y), 0.1).unwrap())
    });
}

fn self_learning(c: &mut Criterion) {
    let data = two_cluster(1);
    let cfg = SolverConfig {
        record_labels: false,
        ..SolverConfig::default()
    };
    c.bench_function("fit_soft two-cluster", |b| {
        b.iter(|| fit_soft(black_box(&data), 0.0, &cfg).unwrap())
    });
    c.bench_function("fit_hard two-cluster", |b| {
        b.iter(|| fit_hard(black_box(&data), 0.0, ClassEncoding::default(), &cfg).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force_hard_minimum");
    group.sample_size(10);
    for u in [8, 12] {
        let data = two_cluster_with(2, u);
        group.bench_with_input(BenchmarkId::from_parameter(u), &data, |b, data| {
            b.iter(|| brute_force_hard_minimum(data, 0.0, ClassEncoding::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ridge, self_learning, enumeration);
criterion_main!(benches);
