use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use intesn_core::readout::ridge_fit;
use intesn_core::rng::{seeded, streams};
use intesn_core::tasks::timing::{bench_engines, packed_step};
use intesn_core::tasks::BenchConfig;
use intesn_core::{Engine, Mat, Stimulus, TrainingBatch};
use rand::Rng;

fn reservoir_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for n in [300, 1000] {
        let cfg = BenchConfig { n, ..Default::default() };
        let (mut esn, int) = bench_engines(&cfg).unwrap();
        let mut plain = int.clone();
        let Engine::Int(mut packed_engine) = int else { unreachable!() };
        let mut packed = packed_engine.packed_state().unwrap();
        let mut s = 0;
        group.bench_with_input(BenchmarkId::new("esn", n), &n, |b, _| {
            b.iter(|| {
                s = (s + 1) % cfg.alphabet;
                esn.step(Stimulus::Symbol(s), None).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("intesn", n), &n, |b, _| {
            b.iter(|| {
                s = (s + 1) % cfg.alphabet;
                plain.step(Stimulus::Symbol(s), None).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("intesn-packed", n), &n, |b, _| {
            b.iter(|| {
                s = (s + 1) % cfg.alphabet;
                packed_step(&mut packed_engine, &mut packed, s).unwrap()
            })
        });
    }
    group.finish();
}

fn random_batch(samples: usize, n: usize, outputs: usize) -> TrainingBatch {
    let mut rng = seeded(1, streams::TRAIN_DATA);
    let states = Mat::from_fn(samples, n, |_, _| rng.random_range(-1.0..1.0));
    let targets = Mat::from_fn(samples, outputs, |_, _| rng.random_range(-1.0..1.0));
    TrainingBatch::new(states, targets).unwrap()
}

fn readout_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("ridge_fit");
    group.sample_size(10);
    for n in [300, 1000] {
        let batch = random_batch(3 * n, n, 16);
        group.bench_with_input(BenchmarkId::new("regularized", n), &batch, |b, batch| {
            b.iter(|| ridge_fit(batch, 1e-3).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pseudo-inverse", n), &batch, |b, batch| {
            b.iter(|| ridge_fit(batch, 0.0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, reservoir_steps, readout_fit);
criterion_main!(benches);
