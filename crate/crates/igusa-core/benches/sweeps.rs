//! Parallel vs sequential prime-sweep benchmarks.
//!
//! `frobenius_sweep` runs on rayon's pool under the default `parallel`
//! feature while `frobenius_sweep_seq` is the single-threaded baseline, so
//! the pairs below measure the speedup directly. Built without default
//! features, both sides collapse to the sequential path and should tie.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use igusa_core::boundary::zero_records;
use igusa_core::euler::igusa_global;
use igusa_core::primes::primes_up_to;
use igusa_core::sweep::{map_primes, map_primes_seq};
use igusa_core::CurveSpec;
use num_complex::Complex64;

fn curve_11a3() -> CurveSpec {
    CurveSpec::from_poly(vec![(0, 2, 1), (0, 1, 1), (3, 0, -1), (2, 0, 1)], false).unwrap()
}

fn bench_frobenius_sweep(c: &mut Criterion) {
    let cm = CurveSpec::example_cm();
    let poly = curve_11a3();
    let mut group = c.benchmark_group("frobenius_sweep");
    group.sample_size(20);
    for cutoff in [2_000u64, 10_000, 50_000] {
        group.bench_with_input(BenchmarkId::new("parallel", cutoff), &cutoff, |b, &n| {
            b.iter(|| cm.frobenius_sweep(n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", cutoff), &cutoff, |b, &n| {
            b.iter(|| cm.frobenius_sweep_seq(n).unwrap())
        });
    }
    for cutoff in [2_000u64, 10_000] {
        group.bench_with_input(
            BenchmarkId::new("poly-parallel", cutoff),
            &cutoff,
            |b, &n| b.iter(|| poly.frobenius_sweep(n).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("poly-sequential", cutoff),
            &cutoff,
            |b, &n| b.iter(|| poly.frobenius_sweep_seq(n).unwrap()),
        );
    }
    group.finish();
}

fn bench_count_kernel(c: &mut Criterion) {
    let curve = CurveSpec::example_cm();
    let primes = primes_up_to(20_000);
    let mut group = c.benchmark_group("count_kernel");
    group.sample_size(20);
    group.bench_function("map_primes", |b| {
        b.iter(|| map_primes(&primes, |p| curve.count_affine_points(p)))
    });
    group.bench_function("map_primes_seq", |b| {
        b.iter(|| map_primes_seq(&primes, |p| curve.count_affine_points(p)))
    });
    group.finish();
}

fn bench_derived_sweeps(c: &mut Criterion) {
    let curve = CurveSpec::example_cm();
    let s = Complex64::new(1.0, 0.0);
    let mut group = c.benchmark_group("derived");
    group.sample_size(20);
    group.bench_function("igusa_global_1e4", |b| {
        b.iter(|| igusa_global(&curve, s, 10_000).unwrap())
    });
    group.bench_function("zero_records_1e4", |b| {
        b.iter(|| zero_records(&curve, 10_000).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_frobenius_sweep,
    bench_count_kernel,
    bench_derived_sweeps
);
criterion_main!(benches);
