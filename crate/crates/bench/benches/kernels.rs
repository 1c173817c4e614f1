use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ltlab_core::verifier::nonradial_members;
use ltlab_core::{
    gamma_fn, integrate_radial, integrate_sphere, leray_functional, make_family, Dimension, FamilyKind, FamilyParams,
    QuadConfig, WeightSpec,
};

fn specialfn(c: &mut Criterion) {
    c.bench_function("gamma_fn", |b| b.iter(|| gamma_fn(black_box(37.25)).unwrap()));
}

fn quadrature(c: &mut Criterion) {
    let cfg = QuadConfig::default();
    let d2 = Dimension::new(2).unwrap();
    let d3 = Dimension::new(3).unwrap();
    c.bench_function("integrate_radial/log_weight", |b| {
        b.iter(|| integrate_radial(|r| 1.0 - r, black_box(WeightSpec::new(0.0, -1.0, 0.5)), d2, &cfg).unwrap())
    });
    c.bench_function("integrate_sphere/n3", |b| {
        b.iter(|| integrate_sphere(|s| (s.polar.cos() + s.azimuth.sin()).powi(2), black_box(d3)).unwrap())
    });
}

fn functionals(c: &mut Criterion) {
    let cfg = QuadConfig::default();
    let d3 = Dimension::new(3).unwrap();
    let radial = make_family(&FamilyParams::new(FamilyKind::Bump, 0.5, 1.0), d3).unwrap();
    let mixed = nonradial_members(d3, 7).remove(0);
    c.bench_function("leray/radial_n3", |b| b.iter(|| leray_functional(black_box(&radial), &cfg).unwrap()));
    let mut g = c.benchmark_group("leray");
    g.sample_size(10);
    g.bench_function("nonradial_n3", |b| b.iter(|| leray_functional(black_box(&mixed), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, specialfn, quadrature, functionals);
criterion_main!(benches);
