use super::*;
use crate::lang::{parse_source, PRIME_EXAMPLE};
use crate::model::ProgramModel;

fn setup(src: &str) -> (SourceUnit, Aosg) {
    let unit = parse_source("t.maj", src).expect("valid program");
    let model = ProgramModel::build(&unit).unwrap();
    let g = Aosg::build(&unit, &model);
    (unit, g)
}

fn exec(src: &str, input: &[i64]) -> (Execution, Vec<Event>) {
    let (unit, g) = setup(src);
    run_collect(&unit, &g, input, RunConfig::default())
}

fn executed_stmts(events: &[Event]) -> Vec<StmtId> {
    events.iter().filter(|e| e.kind == EventKind::StatementExecuted).filter_map(|e| e.stmt).collect()
}

#[test]
fn prime_seven() {
    let (x, events) = exec(PRIME_EXAMPLE, &[7]);
    assert_eq!(x.error, None);
    assert_eq!(x.output, ["Testing the prime no for :7", "Showing the prime status for :7", "Is Prime"]);
    assert_eq!(executed_stmts(&events), [2, 14, 7, 8, 7, 8, 7, 10, 16, 3, 4]);
}

#[test]
fn prime_four() {
    let (x, events) = exec(PRIME_EXAMPLE, &[4]);
    assert_eq!(x.output.last().unwrap(), "Is not Prime");
    let stmts = executed_stmts(&events);
    assert_eq!(stmts.iter().filter(|&&s| s == 9).count(), 1);
    let exit = events.iter().find(|e| e.kind == EventKind::MethodExited && e.stmt == Some(6)).unwrap();
    assert_eq!(exit.returned_by, Some(9));
    assert_eq!(exit.value, Some(Value::Bool(false)));
}

#[test]
fn boundary_order_around_woven_call() {
    let (_, events) = exec(PRIME_EXAMPLE, &[7]);
    let kinds: Vec<(EventKind, Option<StmtId>)> =
        events.iter().filter(|e| e.kind != EventKind::StatementExecuted).map(|e| (e.kind, e.stmt)).collect();
    use EventKind::*;
    assert_eq!(
        kinds,
        [
            (AspectInstantiated, Some(11)),
            (MethodEntered, Some(1)),
            (CallBegin, Some(3)),
            (JoinPointMatched, Some(12)),
            (AdviceEntered, Some(13)),
            (AdviceExited, Some(13)),
            (MethodEntered, Some(6)),
            (MethodExited, Some(6)),
            (AdviceEntered, Some(15)),
            (AdviceExited, Some(15)),
            (CallEnd, Some(3)),
            (MethodExited, Some(1)),
        ]
    );
    let after = events.iter().find(|e| e.kind == AdviceEntered && e.stmt == Some(15)).unwrap();
    assert_eq!(after.defined, [(Var::local("n"), Value::Int(7)), (Var::local("result"), Value::Bool(true))]);
}

#[test]
fn single_print_main() {
    let (x, events) = exec("class A { static void main() { System.out.println(1); } }", &[]);
    assert_eq!(x.output, ["1"]);
    assert_eq!(executed_stmts(&events), [2]);
    assert_eq!(events.len(), 3);
}

#[test]
fn arithmetic_semantics() {
    let src = "class A { static void main() {
        System.out.println(7 % 2 == 0);
        System.out.println(7 / 2);
        System.out.println(-7 / 2);
        System.out.println(-7 % 2);
        System.out.println(9223372036854775807 + 1);
        System.out.println(true || 1 / 0 == 0);
    } }";
    let (x, _) = exec(src, &[]);
    assert_eq!(x.error, None);
    assert_eq!(x.output, ["false", "3", "-3", "-1", "-9223372036854775808", "true"]);
}

#[test]
fn isprime_of_seven_is_true() {
    let (_, events) = exec(PRIME_EXAMPLE, &[7]);
    let end = events.iter().find(|e| e.kind == EventKind::CallEnd).unwrap();
    assert_eq!(end.value, Some(Value::Bool(true)));
}

#[test]
fn events_agree_with_static_def_use() {
    for input in [1, 2, 4, 7, 9, 15, 97] {
        let (unit, g) = setup(PRIME_EXAMPLE);
        let model = ProgramModel::build(&unit).unwrap();
        let (_, events) = run_collect(&unit, &g, &[input], RunConfig::default());
        for e in events.iter().filter(|e| e.kind == EventKind::StatementExecuted) {
            let du = model.def_use.get(e.stmt.unwrap()).unwrap();
            for v in &e.used {
                assert!(du.uses.contains(v), "stmt {:?} reads {v}", e.stmt);
            }
            for (v, _) in &e.defined {
                assert!(du.defs.contains(v), "stmt {:?} defines {v}", e.stmt);
            }
        }
    }
}

#[test]
fn identical_runs_are_identical() {
    let (unit, g) = setup(PRIME_EXAMPLE);
    let dump = || {
        let mut sink = NdjsonSink::new(Vec::new());
        run(&unit, &g, &[97], RunConfig::default(), &mut sink);
        sink.into_inner()
    };
    let a = dump();
    assert_eq!(a, dump());
    for line in String::from_utf8(a).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["seq"].is_u64());
    }
}

#[test]
fn division_by_zero_names_statement() {
    let src = "class A { static void main() { int z = 0; int y = 5 / z; System.out.println(y); } }";
    let (x, events) = exec(src, &[]);
    assert_eq!(x.error, Some(RunError::DivisionByZero { stmt: 3 }));
    assert_eq!(executed_stmts(&events), [2]);
}

#[test]
fn missing_argument() {
    let (x, _) = exec(PRIME_EXAMPLE, &[]);
    assert_eq!(x.error, Some(RunError::MissingArgument { stmt: 2, index: 0 }));
}

#[test]
fn step_budget_stops_loops() {
    let (unit, g) = setup("class A { static void main() { while (true) { System.out.println(1); } } }");
    let cfg = RunConfig { step_budget: 50, ..RunConfig::default() };
    let (x, _) = run_collect(&unit, &g, &[], cfg);
    assert_eq!(x.error, Some(RunError::StepBudgetExceeded { budget: 50 }));
    assert_eq!(x.steps, 51);
}

#[test]
fn runaway_recursion_hits_depth_limit() {
    let (unit, g) = setup("class A { static int f(int x) { return f(x + 1); } static void main() { int y = f(0); } }");
    let (x, _) = run_collect(&unit, &g, &[], RunConfig::default());
    assert!(matches!(x.error, Some(RunError::DepthExceeded { stmt: 2, .. })), "{:?}", x.error);
}

#[test]
fn reads_before_a_call_are_reported_at_call_begin() {
    let src = "class A { static int s;
        static int bump() { s = s + 1; return 0; }
        static void main() { int x = s + bump() + s; } }";
    let (_, events) = exec(src, &[]);
    let begin = events.iter().find(|e| e.kind == EventKind::CallBegin).unwrap();
    assert_eq!(begin.reads, [Read { id: 0, var: Var::global("s") }]);
    let stmt = events.iter().find(|e| e.stmt == Some(5) && e.kind == EventKind::StatementExecuted).unwrap();
    assert_eq!(stmt.reads, [Read { id: 1, var: Var::global("s") }]);
    assert_eq!(stmt.deps, [Dep::Read(0), Dep::Call(0), Dep::Read(1)]);
    assert_eq!(stmt.used, [Var::global("s")]);
}

#[test]
fn short_circuit_guards_calls() {
    let src = "class A { static boolean f(int x) { return x > 0; }
        static void main() { boolean b = false; int k = 3; boolean c = b || f(k); } }";
    let (_, events) = exec(src, &[]);
    let begin = events.iter().find(|e| e.kind == EventKind::CallBegin).unwrap();
    assert_eq!(begin.deps, [Dep::Read(0)]);
    assert_eq!(begin.args, [vec![Dep::Read(1)]]);
}

#[test]
fn for_header_reads_its_own_writes_internally() {
    let src = "class A { static void main() { for (int i = 0; i < 2; i++) { } } }";
    let (_, events) = exec(src, &[]);
    let fors: Vec<&Event> = events.iter().filter(|e| e.kind == EventKind::StatementExecuted).collect();
    assert_eq!(fors.len(), 3);
    assert!(fors[0].reads.is_empty());
    assert!(fors[0].deps.is_empty());
    // step reads the previous value of i; the condition reads the stepped one
    assert_eq!(fors[1].reads, [Read { id: 0, var: Var::local("i") }]);
    assert_eq!(fors[1].deps, [Dep::Read(0)]);
    assert_eq!(fors[2].defined, [(Var::local("i"), Value::Int(2))]);
}

#[test]
fn constructor_runs_and_object_is_created() {
    let src = "class A { static int made; A(int k) { made = made + k; }
        static void main() { A a = new A(4); A b = new A(5); System.out.println(made); } }";
    let (x, events) = exec(src, &[]);
    assert_eq!(x.output, ["9"]);
    let created: Vec<_> = events.iter().filter(|e| e.kind == EventKind::ObjectCreated).map(|e| e.value).collect();
    assert_eq!(created, [Some(Value::Object(1)), Some(Value::Object(2))]);
}

#[test]
fn advice_calls_are_matched_recursively() {
    let src = "class A { static int g(int x) { return x; } static int f(int x) { return x + 1; }
        static void main() { int y = f(1); } }
    aspect T { pointcut pf(int x): call(int A.f(int)) && args(x);
        pointcut pg(int x): call(int A.g(int)) && args(x);
        before(int x): pf(x) { int z = g(x); }
        before(int x): pg(x) { System.out.println(x); } }";
    let (x, events) = exec(src, &[]);
    assert_eq!(x.output, ["1"]);
    let matched = events.iter().filter(|e| e.kind == EventKind::JoinPointMatched).count();
    assert_eq!(matched, 2);
}

#[test]
fn deep_recursion_within_limit() {
    let src = "class A { static int sum(int k) { if (k == 0) { return 0; } return k + sum(k - 1); }
        static void main() { System.out.println(sum(900)); } }";
    let (x, _) = exec(src, &[]);
    assert_eq!(x.error, None);
    assert_eq!(x.output, ["405450"]);
}
