use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use koenigs_core::analysis::forward_certificate;
use koenigs_core::scenarios::{Builtin, DEFAULT_CHANNEL_TRUNCATION};
use koenigs_core::{par, Complex64};

fn starts(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let a = k as f64 * 2.399963;
            Complex64::from_polar(0.85 * ((k as f64 + 0.5) / n as f64).sqrt(), a)
        })
        .collect()
}

fn certificates(c: &mut Criterion) {
    let sg = Builtin::Strip.semigroup(DEFAULT_CHANNEL_TRUNCATION).unwrap();
    let mut group = c.benchmark_group("forward_certificates");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for n in [8, 32] {
        let zs = starts(n);
        let label = if par::is_parallel() { "parallel" } else { "fallback" };
        group.bench_with_input(BenchmarkId::new(label, n), &zs, |b, zs| {
            b.iter(|| par::map(zs, |&z| forward_certificate(&sg, z).unwrap().pass))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &zs, |b, zs| {
            b.iter(|| zs.iter().map(|&z| forward_certificate(&sg, z).unwrap().pass).collect::<Vec<_>>())
        });
    }
    group.finish();
}

criterion_group!(benches, certificates);
criterion_main!(benches);
