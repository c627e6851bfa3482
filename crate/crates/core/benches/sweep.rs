use std::hint::black_box;

use aoslice::batch::{sweep, Mode};
use aoslice::interp::RunConfig;
use aoslice::pipeline::Session;
use aoslice::synth::{random_program, straight_line, Program, SynthConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(n: usize) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    (0..n)
        .map(|i| random_program(&mut rng, &SynthConfig { with_aspect: i % 2 == 0, ..SynthConfig::default() }))
        .collect()
}

fn differential_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("differential_sweep");
    group.sample_size(10);
    for n in [32, 128] {
        let programs = corpus(n);
        group.throughput(Throughput::Elements(n as u64));
        for (label, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &programs, |b, programs| {
                b.iter(|| black_box(sweep(programs, RunConfig::default(), mode)))
            });
        }
    }
    group.finish();
}

fn sliced_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("sliced_chain");
    for n in [50, 200] {
        let session = Session::from_source("chain.maj", &straight_line(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &session, |b, s| {
            b.iter(|| black_box(s.run_sliced(&[1], RunConfig::default()).slicer.stored_elements()))
        });
    }
    group.finish();
}

criterion_group!(benches, differential_sweep, sliced_chain);
criterion_main!(benches);
