//! Rayon vs sequential throughput for the three data-parallel hot loops:
//! classical Monte Carlo trials, proof-chain fuzz cases, and Zeno
//! protocol sweeps. Both paths produce identical output; the benchmark
//! exists to size the speedup (and the small-input overhead) on the
//! machine at hand.
//!
//! Run with `cargo bench -p zenodisc-core`. The sequential path is always
//! compiled; the rayon path needs the default `parallel` feature.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use zenodisc_core::classical::{self, ClassicalConfig};
use zenodisc_core::verifier::{self, FuzzConfig, TensorShape};
use zenodisc_core::zeno::{self, SweepSpec};
use zenodisc_core::{PriorPair, RealPair};

fn classical_estimate(c: &mut Criterion) {
    let cfg = ClassicalConfig::new(
        RealPair::new(0.2, 0.3).unwrap(),
        PriorPair::equal(),
        0.05,
        2_000,
        42,
    );
    let mut group = c.benchmark_group("classical_estimate_2k_trials");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| classical::estimate_sequential(black_box(&cfg)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| {
        b.iter(|| classical::estimate(black_box(&cfg)).unwrap())
    });
    group.finish();
}

fn verifier_fuzz(c: &mut Criterion) {
    let cfg = FuzzConfig {
        n_cases: 1_000,
        shape: TensorShape::new(4, 6).unwrap(),
        seed: 42,
    };
    let mut group = c.benchmark_group("verifier_fuzz_1k_cases");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| verifier::fuzz_sequential(black_box(&cfg)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| {
        b.iter(|| verifier::fuzz(black_box(&cfg)).unwrap())
    });
    group.finish();
}

fn zeno_sweep(c: &mut Criterion) {
    let pair = RealPair::new(0.2, 0.8).unwrap();
    let priors = PriorPair::equal();
    let theta0s = zeno::log_uniform_samples(200, 1e-7, 1e-2, 42).unwrap();
    let spec = SweepSpec::default();
    let mut group = c.benchmark_group("zeno_sweep_200_angles");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| zeno::sweep_sequential(&pair, &priors, black_box(&theta0s), &spec).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| {
        b.iter(|| zeno::sweep(&pair, &priors, black_box(&theta0s), &spec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, classical_estimate, verifier_fuzz, zeno_sweep);
criterion_main!(benches);
