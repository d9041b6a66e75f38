use criterion::{criterion_group, criterion_main, Criterion};
use qprenorm_core::{
    d_qp_renorm, default_initial, dr_spectrum, golden_mean, l_omega_spectrum, qp_renorm, renorm_1d,
    solve_fixed_point, QPMap, RenormConfig,
};
use std::hint::black_box;

fn one_dimensional(c: &mut Criterion) {
    let cfg = RenormConfig::default();
    let phi = qprenorm_bench::fixed_point(&cfg);
    c.bench_function("solve_fixed_point n_x=40", |b| {
        b.iter(|| solve_fixed_point(black_box(&default_initial(&cfg)), &cfg).unwrap())
    });
    c.bench_function("renorm_1d", |b| b.iter(|| renorm_1d(black_box(&phi), &cfg).unwrap()));
    c.bench_function("dr_spectrum", |b| b.iter(|| dr_spectrum(black_box(&phi), &cfg).unwrap()));
}

fn quasi_periodic(c: &mut Criterion) {
    let cfg = RenormConfig::default();
    let phi = qprenorm_bench::fixed_point(&cfg);
    let w = golden_mean();
    let g = qprenorm_bench::forced_map(&cfg);
    let base = QPMap::uncoupled(&phi, cfg.k_theta);
    c.bench_function("qp_renorm forced map", |b| b.iter(|| qp_renorm(w, black_box(&g), &cfg).unwrap()));
    c.bench_function("d_qp_renorm at fixed point", |b| {
        b.iter(|| d_qp_renorm(w, black_box(&base), &g).unwrap())
    });
    c.bench_function("l_omega_spectrum", |b| {
        b.iter(|| l_omega_spectrum(black_box(&phi), w, &cfg).unwrap())
    });
}

criterion_group!(benches, one_dimensional, quasi_periodic);
criterion_main!(benches);
