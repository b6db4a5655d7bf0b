//! Parallel vs sequential throughput on the data-parallel hot paths:
//! randomized experiment trials and the exponential correlation sweep.
//!
//! Run with `cargo bench -p ncycle`; build with `--no-default-features` to
//! measure the fully sequential crate instead.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ncycle::experiment::{appendix_experiment, ExperimentConfig};
use ncycle::inequality::full_report_with;
use ncycle::vertex::random_ns_box;

fn bench_experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment_n4_300_trials");
    group.sample_size(10);
    for (name, parallel) in [("parallel", true), ("sequential", false)] {
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut cfg = ExperimentConfig::new(4, 300, 7);
                cfg.parallel = parallel;
                black_box(appendix_experiment(&cfg).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_report_sweep(c: &mut Criterion) {
    // 2^15 correlation values per report at n = 16
    let b = random_ns_box(16, 3).unwrap();
    let mut group = c.benchmark_group("full_report_n16");
    for (name, parallel) in [("parallel", true), ("sequential", false)] {
        group.bench_function(name, |bench| {
            bench.iter(|| black_box(full_report_with(&b, 1e-9, parallel).unwrap()))
        });
    }
    group.finish();
}

fn bench_activation_scan(c: &mut Criterion) {
    use ncycle::{activation_search, ActivationOptions};
    let signs = ncycle::SignVector::canonical(6).unwrap();
    let near_threshold = ncycle::isotropic_box(6, 0.68, &signs).unwrap();
    c.bench_function("activation_near_threshold_n6", |bench| {
        bench.iter(|| {
            black_box(activation_search(&near_threshold, &ActivationOptions::default()).unwrap())
        })
    });
}

criterion_group!(
    benches,
    bench_experiment,
    bench_report_sweep,
    bench_activation_scan
);
criterion_main!(benches);
