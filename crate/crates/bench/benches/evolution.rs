use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use scatterlab_bench::fixture;
use scatterlab_core::energy::energy_breakdown;
use scatterlab_core::evolve::{evolve_forward, extract_radiation};
use scatterlab_core::scattering::inverse_trace;

fn forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve_forward");
    group.sample_size(10);
    for n in [256, 512, 1024] {
        let (grid, data) = fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| evolve_forward(&data, &grid).unwrap())
        });
    }
    group.finish();
}

fn inverse(c: &mut Criterion) {
    let mut group = c.benchmark_group("inverse_trace");
    group.sample_size(10);
    for n in [256, 512] {
        let (grid, data) = fixture(n);
        let trace = extract_radiation(&evolve_forward(&data, &grid).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| inverse_trace(&trace, &grid).unwrap())
        });
    }
    group.finish();
}

fn energy(c: &mut Criterion) {
    let (grid, data) = fixture(512);
    let field = evolve_forward(&data, &grid).unwrap();
    let times: Vec<f64> = (0..=8).map(|k| 10.0 * k as f64).collect();
    c.bench_function("energy_breakdown/512", |b| b.iter(|| energy_breakdown(&field, &times).unwrap()));
}

criterion_group!(benches, forward, inverse, energy);
criterion_main!(benches);
