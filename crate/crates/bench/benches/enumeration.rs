use baker_bench::{quadratic, rational};
use baker_core::enumerate_solutions;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn rational_caps(c: &mut Criterion) {
    let eq = rational(&[2, 3, 5], "1", "1");
    let mut group = c.benchmark_group("enumerate/Q{2,3,5}");
    group.sample_size(10);
    for cap in [2u32, 4, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(cap), &cap, |b, &cap| {
            b.iter(|| enumerate_solutions(&eq, cap).unwrap())
        });
    }
    group.finish();
}

fn quadratic_units(c: &mut Criterion) {
    let eq = quadratic(2, &[7]);
    let mut group = c.benchmark_group("enumerate/Q(sqrt2){7}");
    group.sample_size(10);
    group.bench_function("cap 6", |b| b.iter(|| enumerate_solutions(&eq, 6).unwrap()));
    group.finish();
}

criterion_group!(benches, rational_caps, quadratic_units);
criterion_main!(benches);
