use aoslice::batch::{sweep, Mode};
use aoslice::interp::RunConfig;
use aoslice::synth::{random_program, Program, SynthConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64, n: usize, max_stmts: u32) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| random_program(&mut rng, &SynthConfig { max_stmts, with_aspect: i % 2 == 0, inputs: 1 + i % 3 }))
        .collect()
}

fn assert_agreement(programs: &[Program]) {
    for (p, report) in programs.iter().zip(sweep(programs, RunConfig::default(), Mode::Parallel)) {
        let report = report.unwrap_or_else(|e| panic!("{e}\n{}", p.source));
        assert!(report.initial_marks_ok);
        assert!(report.mismatches.is_empty(), "{:#?}\n{}\ninput {:?}", report.mismatches, p.source, p.input);
    }
}

#[test]
fn small_programs() {
    let n = std::env::var("AOSLICE_DIFF_PROGRAMS").ok().and_then(|s| s.parse().ok()).unwrap_or(200);
    assert_agreement(&corpus(7, n, 40));
}

#[test]
fn larger_programs() {
    assert_agreement(&corpus(8, 40, 90));
}
