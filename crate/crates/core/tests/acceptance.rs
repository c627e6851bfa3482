//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aoslice::aosg::EdgeKind;
use aoslice::batch::{sweep, Mode};
use aoslice::interp::RunConfig;
use aoslice::lang::StmtId;
use aoslice::pipeline::{slice_report, Session};
use aoslice::slicer::{Criterion, Slicer};
use aoslice::synth::{random_program, straight_line, Program, SynthConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: [StmtId; 14] = [1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16];
const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const CORPUS_SIZE: usize = 500;
const CORPUS_SEED: u64 = 2024;
const CORPUS_LIMIT: Duration = Duration::from_secs(60);
const CORPUS_STEP_BUDGET: u64 = 100_000;
const REPEATED_LOOKUPS: usize = 1000;
const CHAIN_SIZES: [usize; 3] = [50, 100, 200];
/// Allowed factor between measured storage and the n² prediction.
const QUADRATIC_SLACK: f64 = 4.0;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn prime() -> Session {
    Session::load(&fixture("prime.maj")).expect("fixture loads")
}

fn corpus() -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|i| random_program(&mut rng, &SynthConfig { max_stmts: 40, with_aspect: i % 2 == 0, inputs: 1 + i % 3 }))
        .collect()
}

fn golden_slice() -> Outcome {
    let start = Instant::now();
    let session = prime();
    let run = session.run_sliced(&[7], RunConfig::default());
    let slice = run.slicer.lookup(&Criterion::new(16, "n")).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if slice.stmts != GOLDEN {
        return Err(format!("<16, n> = {:?}, expected {GOLDEN:?}", slice.stmts));
    }
    if took >= GOLDEN_LIMIT {
        return Err(format!("took {took:?}, limit {GOLDEN_LIMIT:?}"));
    }
    Ok(format!("<16, n> = {:?} in {took:.2?} (limit {GOLDEN_LIMIT:?})", slice.stmts))
}

fn contributor_table() -> Outcome {
    let session = prime();
    let run = session.run_sliced(&[7], RunConfig::default());
    let of = |stmt: StmtId| run.slicer.contributors(&Criterion::new(stmt, "n")).map_err(|e| e.to_string());
    let exact: [(StmtId, &[StmtId]); 8] =
        [(16, &[15]), (14, &[13]), (13, &[12]), (2, &[1]), (12, &[3, 11]), (8, &[6, 7]), (7, &[6]), (6, &[3, 14])];
    for (stmt, want) in exact {
        let got = of(stmt)?;
        if got != want.iter().copied().collect() {
            return Err(format!("contributors of {stmt} = {got:?}, expected {want:?}"));
        }
    }
    let at_least: [(StmtId, &[StmtId]); 2] = [(15, &[9, 10, 12]), (3, &[1, 2, 9, 10, 16])];
    for (stmt, want) in at_least {
        let got = of(stmt)?;
        let want: BTreeSet<StmtId> = want.iter().copied().collect();
        if !got.is_superset(&want) {
            return Err(format!("contributors of {stmt} = {got:?}, expected a superset of {want:?}"));
        }
    }
    Ok("8 exact contributor sets, 2 superset checks".into())
}

fn oracle_equivalence(programs: &[Program]) -> Outcome {
    let start = Instant::now();
    let config = RunConfig { step_budget: CORPUS_STEP_BUDGET, ..RunConfig::default() };
    let reports = sweep(programs, config, Mode::Parallel);
    let took = start.elapsed();
    let mut criteria = 0;
    for (i, r) in reports.into_iter().enumerate() {
        let r = r.map_err(|e| format!("program {i}: {e}"))?;
        if let Some(m) = r.mismatches.first() {
            return Err(format!("program {i}: {:?} slicer {:?} oracle {:?}", m.criterion, m.marking, m.oracle));
        }
        criteria += r.criteria;
    }
    let with_aspect = programs.iter().filter(|p| p.has_aspect).count();
    if with_aspect * 2 < programs.len() {
        return Err(format!("only {with_aspect} of {} programs have an aspect", programs.len()));
    }
    if took >= CORPUS_LIMIT {
        return Err(format!("took {took:?}, limit {CORPUS_LIMIT:?}"));
    }
    Ok(format!(
        "{} programs ({with_aspect} with aspects), {criteria} criteria identical in {took:.2?} (limit {CORPUS_LIMIT:?})",
        programs.len()
    ))
}

fn availability() -> Outcome {
    let session = prime();
    let run = session.run_sliced(&[7], RunConfig::default());
    let state = run.slicer.state().clone();
    let visits = session.graph.edge_visits();
    let c = Criterion::new(16, "n");
    let first = run.slicer.lookup(&c).map_err(|e| e.to_string())?;
    for _ in 0..REPEATED_LOOKUPS {
        if run.slicer.lookup(&c).map_err(|e| e.to_string())? != first {
            return Err("repeated lookup changed its answer".into());
        }
    }
    let traversed = session.graph.edge_visits() - visits;
    if traversed != 0 {
        return Err(format!("{traversed} edge visits during lookups"));
    }
    if *run.slicer.state() != state {
        return Err("slicer state changed during lookups".into());
    }
    Ok(format!("{} lookups, 0 edge visits, state unchanged", REPEATED_LOOKUPS + 1))
}

fn space_bound() -> Outcome {
    let mut stored = Vec::new();
    for n in CHAIN_SIZES {
        let session = Session::from_source("chain.maj", &straight_line(n)).map_err(|e| e.to_string())?;
        let run = session.run_sliced(&[1], RunConfig::default());
        stored.push((n, run.slicer.stored_elements()));
    }
    let (n0, s0) = stored[0];
    let c = s0 as f64 / (n0 * n0) as f64;
    let mut ratios = Vec::new();
    for &(n, s) in &stored {
        let ratio = s as f64 / (c * (n * n) as f64);
        if !(1.0 / QUADRATIC_SLACK..=QUADRATIC_SLACK).contains(&ratio) {
            return Err(format!("n = {n}: {s} elements, {ratio:.2}x the c*n^2 prediction (c = {c:.3})"));
        }
        ratios.push(format!("n={n}: {s} ({ratio:.2}x)"));
    }
    // storage must actually grow quadratically, not linearly
    let (n1, s1) = stored[stored.len() - 1];
    let growth = (s1 as f64 / s0 as f64).ln() / (n1 as f64 / n0 as f64).ln();
    if !(1.5..=2.5).contains(&growth) {
        return Err(format!("storage grows as n^{growth:.2}"));
    }
    Ok(format!("c = {c:.3}, {}, exponent {growth:.2}", ratios.join(", ")))
}

fn initial_marks(programs: &[Program]) -> Outcome {
    let mut edges = 0;
    for (i, p) in programs.iter().enumerate() {
        let session = Session::from_source("generated.maj", &p.source).map_err(|e| format!("program {i}: {e}"))?;
        let slicer = Slicer::new(&session.graph, &session.model);
        for e in session.graph.edges() {
            if slicer.marks()[e.id as usize] != (e.kind == EdgeKind::ControlDep) {
                return Err(format!("program {i}: edge {} ({}) starts with the wrong mark", e.id, e.kind));
            }
        }
        edges += session.graph.edge_count();
    }
    Ok(format!("{} programs, {edges} edges: marked exactly when ControlDep", programs.len()))
}

fn render(path: &Path, input: &[i64]) -> Result<(String, String), String> {
    let session = Session::load(path).map_err(|e| e.to_string())?;
    let run = session.run_sliced(input, RunConfig::default());
    if let Some(e) = &run.execution.error {
        return Err(format!("{}: {e}", path.display()));
    }
    let executed = run.slicer.executed();
    let mut criteria = Vec::new();
    for &stmt in &executed {
        if let Some(du) = session.model.def_use.get(stmt) {
            let names: BTreeSet<&str> = du.defs.iter().chain(&du.uses).map(|v| v.name.as_str()).collect();
            criteria.extend(names.into_iter().map(|n| Criterion::new(stmt, n)));
        }
    }
    let slices = run.slices(&criteria).map_err(|e| e.to_string())?;
    let json = serde_json::to_string(&slice_report(&slices, input, &executed)).expect("serializable");
    Ok((json, session.graph.to_dot(Some(run.slicer.marks()))))
}

fn determinism() -> Outcome {
    let cases: [(&str, &[i64]); 5] = [
        ("prime.maj", &[7]),
        ("prime.maj", &[4]),
        ("account.maj", &[100, 20]),
        ("factorial.maj", &[5]),
        ("loops.maj", &[9]),
    ];
    for (name, input) in cases {
        let path = fixture(name);
        let first = render(&path, input)?;
        let second = render(&path, input)?;
        if first != second {
            return Err(format!("{name} {input:?}: outputs differ between runs"));
        }
    }
    Ok(format!("{} fixture runs: JSON slices and DOT byte-identical", cases.len()))
}

fn main() -> ExitCode {
    let programs = corpus();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("golden slice", Box::new(golden_slice)),
        ("contributor table", Box::new(contributor_table)),
        ("oracle equivalence", Box::new(|| oracle_equivalence(&programs))),
        ("slice availability", Box::new(availability)),
        ("space bound", Box::new(space_bound)),
        ("static-mark initialization", Box::new(|| initial_marks(&programs))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
