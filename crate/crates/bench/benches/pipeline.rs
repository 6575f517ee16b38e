use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use xscale_bench::{config, fixture};
use xscale_core::{
    bicubic_resample, build_graph, same_scale_knn, ssim_y, super_resolve, BoundaryPolicy,
};

fn resample(c: &mut Criterion) {
    let mut group = c.benchmark_group("bicubic_resample");
    for size in [64, 256] {
        let (hr, lr) = fixture(size);
        group.bench_with_input(BenchmarkId::new("up_x2", size), &lr, |b, img| {
            b.iter(|| bicubic_resample(black_box(img), 2.0, BoundaryPolicy::Reflect).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("down_x2", size), &hr, |b, img| {
            b.iter(|| bicubic_resample(black_box(img), 0.5, BoundaryPolicy::Reflect).unwrap())
        });
    }
    group.finish();
}

fn graph(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("build_graph");
    group.sample_size(10);
    for size in [64, 128] {
        let (_, lr) = fixture(size * 2);
        let down = bicubic_resample(&lr, 0.5, cfg.boundary).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(size),
            &(lr, down),
            |b, (lr, down)| b.iter(|| build_graph(black_box(lr), black_box(down), &cfg).unwrap()),
        );
    }
    group.finish();
}

fn pipelines(c: &mut Criterion) {
    let cfg = config();
    let (_, lr) = fixture(128);
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("super_resolve_64", |b| {
        b.iter(|| super_resolve(black_box(&lr), &cfg).unwrap())
    });
    group.bench_function("same_scale_knn_64", |b| {
        b.iter(|| same_scale_knn(black_box(&lr), &cfg).unwrap())
    });
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let (hr, lr) = fixture(256);
    let up = bicubic_resample(&lr, 2.0, BoundaryPolicy::Reflect).unwrap();
    c.bench_function("ssim_y_256", |b| {
        b.iter(|| ssim_y(black_box(&up), black_box(&hr), 2).unwrap())
    });
}

criterion_group!(benches, resample, graph, pipelines, metrics);
criterion_main!(benches);
