use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hgplvm::objective::{objective_bayesian, objective_full, objective_sparse};
use hgplvm::HeKernel;
use hgplvm_bench::fixture;
use std::hint::black_box;

fn objectives(c: &mut Criterion) {
    let mut group = c.benchmark_group("objective");
    group.sample_size(10);
    for depth in [3, 4] {
        let f = fixture(depth, 32, 4, 7);
        let n = f.y.nrows();
        group.bench_with_input(BenchmarkId::new("full", n), &f, |b, f| {
            b.iter(|| objective_full(black_box(&f.y), &f.x, &f.hyper).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sparse_m32", n), &f, |b, f| {
            b.iter(|| objective_sparse(black_box(&f.y), &f.x, &f.z, &f.hyper).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bayesian_m32_h4", n), &f, |b, f| {
            b.iter(|| objective_bayesian(black_box(&f.y), &f.states, &f.z, &f.zeta, &f.hyper).unwrap())
        });
    }
    group.finish();
}

fn gram(c: &mut Criterion) {
    let f = fixture(4, 32, 1, 7);
    let k = HeKernel::new(1.0, 100.0).unwrap();
    c.bench_function("gram_sym_300", |b| b.iter(|| k.gram_sym(black_box(&f.x))));
    c.bench_function("gram_300x32", |b| b.iter(|| k.gram(black_box(&f.x), &f.z)));
}

criterion_group!(benches, objectives, gram);
criterion_main!(benches);
