use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use aoslice::batch::check_program;
use aoslice::interp::RunConfig;
use aoslice::lang::StmtId;
use aoslice::oracle::Trace;
use aoslice::pipeline::Session;
use aoslice::slicer::{Criterion, LookupError};
use aoslice::synth::{random_program, Program, SynthConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture_source(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn assert_agree(program: &Program) {
    let report = check_program(program, RunConfig::default()).unwrap();
    assert!(report.initial_marks_ok);
    assert!(report.mismatches.is_empty(), "{:#?}\ninput {:?}", report.mismatches, program.input);
}

#[test]
fn fixtures_agree_with_the_oracle() {
    let cases: [(&str, Vec<Vec<i64>>); 4] = [
        ("prime.maj", (0..40).map(|n| vec![n]).collect()),
        ("account.maj", vec![vec![100, 20], vec![10, 5], vec![0, 0], vec![50, -80]]),
        ("factorial.maj", (0..8).map(|n| vec![n]).collect()),
        ("loops.maj", (-2..12).map(|n| vec![n]).collect()),
    ];
    for (name, inputs) in cases {
        let source = fixture_source(name);
        for input in inputs {
            assert_agree(&Program { source: source.clone(), input, has_aspect: false });
        }
    }
}

#[test]
fn prime_slices_for_both_outcomes() {
    let session = Session::from_source("prime.maj", &fixture_source("prime.maj")).unwrap();
    let run = session.run_sliced(&[9], RunConfig::default());
    let s = |stmt, var: &str| run.slicer.lookup(&Criterion::new(stmt, var)).unwrap().stmts;
    // 9 is composite: the early return ran; `return true` has no enclosing
    // predicate, so it is not a potential return
    assert_eq!(s(16, "n"), [1, 2, 3, 6, 7, 8, 9, 11, 12, 13, 14, 15, 16]);
    assert_eq!(s(2, "n"), [1, 2]);
    assert!(matches!(run.slicer.lookup(&Criterion::new(4, "n")), Err(LookupError::NotExecuted { .. })));
    // statement 5 prints a literal and mentions no variable
    assert!(matches!(run.slicer.lookup(&Criterion::new(5, "n")), Err(LookupError::UnknownVariable { .. })));
}

#[test]
fn oracle_trace_shape() {
    let session = Session::from_source("prime.maj", &fixture_source("prime.maj")).unwrap();
    let (_, events) = session.run_recorded(&[7], RunConfig::default());
    let trace = Trace::build(&session.model, &events).unwrap();
    assert_eq!(trace.occurrences(7), 3);
    assert_eq!(trace.occurrences(8), 2);
    assert_eq!(trace.occurrences(9), 0);
    for e in &trace.entries {
        assert!(e.sources.iter().all(|&s| s < e.index));
    }
}

#[test]
fn recursion_keeps_definitions_per_activation() {
    let src = "class R {
        static int down(int k) {
            int here = k * 10;
            if (k > 0) {
                int below = down(k - 1);
            }
            return here;
        }
        public static void main(String[] args) {
            int r = down(Integer.parseInt(args[0]));
            System.out.println(r);
        }
    }";
    let session = Session::from_source("r.maj", src).unwrap();
    let run = session.run_sliced(&[3], RunConfig::default());
    assert_eq!(run.execution.output, ["30"]);
    let slice = run.slicer.lookup(&Criterion::new(8, "r")).unwrap().stmts;
    // the returned `here` is the outer activation's, so the recursive call is not in the slice
    assert_eq!(slice, [1, 2, 5, 6, 7, 8]);
    assert_agree(&Program { source: src.into(), input: vec![3], has_aspect: false });
}

/// Straight-line assignments over four variables, each reading up to two others.
#[derive(Debug, Clone)]
struct Assign {
    target: usize,
    reads: Vec<usize>,
    constant: i64,
}

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn straight_source(assigns: &[Assign]) -> String {
    let mut src = String::from("class S {\n public static void main(String[] args) {\n");
    src.push_str("  int a = Integer.parseInt(args[0]);\n  int b = 1;\n  int c = 2;\n  int d = 3;\n");
    for a in assigns {
        let mut rhs: Vec<String> = a.reads.iter().map(|&r| NAMES[r].to_string()).collect();
        rhs.push(a.constant.to_string());
        src.push_str(&format!("  {} = {};\n", NAMES[a.target], rhs.join(" + ")));
    }
    src.push_str(" }\n}\n");
    src
}

/// Backward closure over the syntax alone: statement numbers start at 2 for
/// the declarations; the method header 1 controls everything.
fn syntactic_slice(assigns: &[Assign], upto: usize, var: usize) -> BTreeSet<StmtId> {
    let mut defs: Vec<HashMap<usize, StmtId>> = Vec::new();
    let mut current: HashMap<usize, StmtId> = (0..4).map(|v| (v, v as StmtId + 2)).collect();
    let mut reads: HashMap<StmtId, Vec<usize>> = HashMap::new();
    for (i, a) in assigns.iter().enumerate() {
        defs.push(current.clone());
        let stmt = i as StmtId + 6;
        reads.insert(stmt, a.reads.clone());
        current.insert(a.target, stmt);
    }
    let stmt = upto as StmtId + 6;
    let mut out = BTreeSet::from([1, stmt]);
    let mut work = vec![defs[upto][&var]];
    while let Some(s) = work.pop() {
        if !out.insert(s) {
            continue;
        }
        if s >= 6 {
            let i = (s - 6) as usize;
            work.extend(reads[&s].iter().map(|r| defs[i][r]));
        }
    }
    out
}

fn assign_strategy() -> impl Strategy<Value = Assign> {
    (0..4usize, proptest::collection::vec(0..4usize, 0..3), -5..5i64).prop_map(|(target, reads, constant)| Assign {
        target,
        reads,
        constant,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn straight_line_slices_are_syntactic_closures(
        assigns in proptest::collection::vec(assign_strategy(), 1..25),
        pick in any::<proptest::sample::Index>(),
        input in -100..100i64,
    ) {
        let src = straight_source(&assigns);
        let session = Session::from_source("s.maj", &src).unwrap();
        let (run, events) = session.run_recorded(&[input], RunConfig::default());
        let trace = Trace::build(&session.model, &events).unwrap();
        let k = pick.index(assigns.len());
        let stmt = k as StmtId + 6;
        for &var in &assigns[k].reads {
            let want = syntactic_slice(&assigns, k, var);
            let got: BTreeSet<StmtId> = run.slicer.lookup(&Criterion::new(stmt, NAMES[var])).unwrap().stmts.into_iter().collect();
            let oracle = trace.slice(&session.model, stmt, NAMES[var]).unwrap();
            prop_assert_eq!(&got, &want);
            prop_assert_eq!(&oracle, &want);
        }
    }

    #[test]
    fn generated_programs_agree(seed in any::<u64>(), with_aspect in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, &SynthConfig { with_aspect, ..SynthConfig::default() });
        let report = check_program(&program, RunConfig::default()).unwrap();
        prop_assert!(report.mismatches.is_empty(), "{:#?}\n{}", report.mismatches, program.source);
    }
}
