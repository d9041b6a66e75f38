use criterion::{criterion_group, criterion_main, Criterion};
use qprenorm_core::dynamics::{eps_ladder, trace_boundary, Branch};
use qprenorm_core::{find_invariant_curve, golden_mean, reducibility_indicator, slopes, Flm, RenormConfig};
use std::hint::black_box;

fn curves(c: &mut Criterion) {
    let cfg = RenormConfig::default();
    let w = golden_mean();
    let g = qprenorm_bench::forced_map(&cfg);
    c.bench_function("find_invariant_curve period 4", |b| {
        b.iter(|| find_invariant_curve(black_box(&g), w, 2, &cfg).unwrap())
    });
    let curve = find_invariant_curve(&g, w, 2, &cfg).unwrap();
    c.bench_function("reducibility_indicator period 4", |b| {
        b.iter(|| reducibility_indicator(black_box(&curve), &g, w, &cfg).unwrap())
    });
}

fn boundaries(c: &mut Criterion) {
    let cfg = RenormConfig::default();
    let w = golden_mean();
    let fam = Flm::default();
    let mut group = c.benchmark_group("boundaries");
    group.sample_size(10);
    group.bench_function("slopes n=2", |b| b.iter(|| slopes(black_box(2), w, &fam, &cfg).unwrap()));
    group.bench_function("trace_boundary n=1 plus", |b| {
        b.iter(|| trace_boundary(1, w, &fam, &eps_ladder(1), Branch::Plus, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, curves, boundaries);
criterion_main!(benches);
