use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use flatfront::deform::{calapso_transport, deform_front, holonomy_residual};
use flatfront::front::{integrate_frame, FrameOptions};
use flatfront::BaseSurface;
use flatfront_bench::{base_surface, reference};

fn frame(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate_frame");
    for n in [33, 65, 129] {
        let (phi, dom) = reference(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| integrate_frame(&phi, &dom, 0.25).unwrap())
        });
    }
    g.finish();
}

fn base(c: &mut Criterion) {
    let (phi, dom) = reference(65);
    c.bench_function("base_surface/65", |b| {
        b.iter(|| BaseSurface::new(&phi, &dom, &FrameOptions::default()).unwrap())
    });
}

fn transport(c: &mut Criterion) {
    let mut g = c.benchmark_group("calapso_transport");
    for n in [33, 65] {
        let s = base_surface(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| calapso_transport(&s.tau, 0.25, &s.dom).unwrap())
        });
    }
    g.finish();
    let s = base_surface(65);
    c.bench_function("holonomy_residual/65", |b| b.iter(|| holonomy_residual(&s.tau, 0.25).unwrap()));
    c.bench_function("deform_front/65", |b| b.iter(|| deform_front(&s, 0.75).unwrap()));
}

criterion_group!(benches, frame, base, transport);
criterion_main!(benches);
