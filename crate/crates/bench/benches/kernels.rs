use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use helixwave_core::{
    adf_test, fit_wave_train, interaction_information, kdv_residual, n_soliton_field,
    CategoricalJoint, FieldGrid, FitConfig, SolitonSpec, TimeSeries, WaveTrain,
};

fn bench_interaction(c: &mut Criterion) {
    let weights: Vec<f64> = (0..256).map(|i| 1.0 + ((i * 7919) % 13) as f64).collect();
    let joint = CategoricalJoint::from_shape(&[4, 4, 4, 4], weights).unwrap();
    c.bench_function("interaction_information_4x4x4x4", |b| {
        b.iter(|| interaction_information(black_box(&joint)).unwrap())
    });
}

fn bench_hirota(c: &mut Criterion) {
    let spec = SolitonSpec::new(vec![1.0, 2.0, 3.0]).unwrap();
    let grid = FieldGrid::new(-15.0, 15.0, 601, -1.0, 1.0, 101).unwrap();
    c.bench_function("n_soliton_field_n3_601x101", |b| {
        b.iter(|| n_soliton_field(black_box(&spec), black_box(&grid)).unwrap())
    });
    let field = n_soliton_field(&spec, &grid).unwrap();
    c.bench_function("kdv_residual_601x101", |b| {
        b.iter(|| kdv_residual(black_box(&field), 0.0, 6.0).unwrap())
    });
}

fn bench_fit(c: &mut Criterion) {
    let train = WaveTrain::from_parts(
        &[10.54, 32.15, 53.76],
        &[0.062, 0.09, 0.06],
        &[20.0, 61.0, 102.0],
        0.0,
    )
    .unwrap();
    let t: Vec<f64> = (0..136).map(f64::from).collect();
    let series = TimeSeries::from_train(&train, t, "bench").unwrap();
    let config = FitConfig::with_waves(3);
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    group.bench_function("fit_wave_train_3_pulses", |b| {
        b.iter(|| fit_wave_train(black_box(&series), black_box(&config)).unwrap())
    });
    group.finish();
}

fn bench_adf(c: &mut Criterion) {
    let series: Vec<f64> = (0..250).map(|i| ((i * 37 % 101) as f64).sin()).collect();
    c.bench_function("adf_test_n250_lag4", |b| {
        b.iter(|| adf_test(black_box(&series), 4).unwrap())
    });
}

criterion_group!(benches, bench_interaction, bench_hirota, bench_fit, bench_adf);
criterion_main!(benches);
