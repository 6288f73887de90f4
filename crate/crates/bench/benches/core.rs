use std::hint::black_box;

use avgapprox::avg_error::{avg_error_exact, LinearAlgorithm};
use avgapprox::designs::hyperbolic_cross;
use avgapprox::kernel::{factor1d, gram};
use avgapprox::spectrum::eig1d;
use avgapprox::ProblemSpec;
use avgapprox_bench::mapped_cross_2d;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("factor1d");
    for r in [0u32, 2, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| factor1d(black_box(0.37), black_box(0.81), r))
        });
    }
    g.finish();
}

fn gram_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram");
    g.sample_size(10);
    for level in [5u32, 7] {
        let (spec, design) = mapped_cross_2d(level);
        g.bench_with_input(BenchmarkId::from_parameter(design.len()), &design, |b, d| {
            b.iter(|| gram(d, &spec).unwrap())
        });
    }
    g.finish();
}

fn exact_error(c: &mut Criterion) {
    let mut g = c.benchmark_group("avg_error_exact");
    g.sample_size(10);
    for level in [5u32, 7] {
        let (spec, design) = mapped_cross_2d(level);
        let alg = LinearAlgorithm::spline(&design, &spec).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(design.len()), &alg, |b, a| {
            b.iter(|| avg_error_exact(a).unwrap())
        });
    }
    g.finish();
}

fn designs(c: &mut Criterion) {
    let spec = ProblemSpec::with_smoothness(&[0, 1, 2]).unwrap();
    c.bench_function("hyperbolic_cross_d3_L10", |b| b.iter(|| hyperbolic_cross(black_box(10), &spec).unwrap()));
}

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("eig1d");
    g.sample_size(10);
    g.bench_function("r0_m512", |b| b.iter(|| eig1d(0, 512).unwrap()));
    g.finish();
}

criterion_group!(benches, kernel, gram_build, exact_error, designs, spectrum);
criterion_main!(benches);
