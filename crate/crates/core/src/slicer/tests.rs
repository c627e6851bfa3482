use super::*;
use crate::interp::{run_collect, RunConfig};
use crate::lang::{parse_source, SourceUnit, PRIME_EXAMPLE};

fn setup(src: &str) -> (SourceUnit, ProgramModel, Aosg) {
    let unit = parse_source("t.maj", src).expect("valid program");
    let model = ProgramModel::build(&unit).unwrap();
    let g = Aosg::build(&unit, &model);
    (unit, model, g)
}

fn events(unit: &SourceUnit, g: &Aosg, input: &[i64]) -> Vec<Event> {
    let (x, events) = run_collect(unit, g, input, RunConfig::default());
    assert_eq!(x.error, None);
    events
}

fn slice_all<'g>(g: &'g Aosg, model: &'g ProgramModel, events: &[Event]) -> Slicer<'g> {
    let mut s = Slicer::new(g, model);
    for e in events {
        s.apply(e).unwrap();
    }
    s
}

fn stmts(s: &Slicer<'_>, stmt: StmtId, var: &str) -> Vec<StmtId> {
    s.lookup(&Criterion::new(stmt, var)).unwrap().stmts
}

fn set(xs: &[StmtId]) -> BTreeSet<StmtId> {
    xs.iter().copied().collect()
}

#[test]
fn prime_seven_after_advice_print() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let s = slice_all(&g, &model, &events(&unit, &g, &[7]));
    assert_eq!(stmts(&s, 16, "n"), [1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16]);
}

#[test]
fn prime_seven_small_slices() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let s = slice_all(&g, &model, &events(&unit, &g, &[7]));
    assert_eq!(stmts(&s, 2, "n"), [1, 2]);
    assert_eq!(stmts(&s, 14, "n"), [1, 2, 3, 11, 12, 13, 14]);
    assert_eq!(s.lookup(&Criterion::new(5, "n")), Err(LookupError::NotExecuted { stmt: 5 }));
    assert_eq!(s.lookup(&Criterion::new(2, "zz")), Err(LookupError::UnknownVariable { stmt: 2, var: "zz".into() }));
    assert_eq!(s.lookup(&Criterion::new(99, "n")), Err(LookupError::UnknownStatement { stmt: 99 }));
}

#[test]
fn prime_seven_contributors() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let s = slice_all(&g, &model, &events(&unit, &g, &[7]));
    let c = |stmt, var: &str| s.contributors(&Criterion::new(stmt, var)).unwrap();
    assert_eq!(c(16, "n"), set(&[15]));
    assert_eq!(c(14, "n"), set(&[13]));
    assert_eq!(c(13, "n"), set(&[12]));
    assert_eq!(c(12, "n"), set(&[3, 11]));
    assert_eq!(c(6, "n"), set(&[3, 14]));
    assert_eq!(c(2, "n"), set(&[1]));
    assert_eq!(c(8, "n"), set(&[6, 7]));
    assert_eq!(c(7, "n"), set(&[6]));
    assert!(c(15, "n").is_superset(&set(&[9, 10, 12])));
    assert!(c(3, "n").is_superset(&set(&[1, 2, 9, 10, 16])));
}

#[test]
fn slice_of_a_prefix_run() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let events = events(&unit, &g, &[7]);
    let first_8 = events.iter().position(|e| e.kind == EventKind::StatementExecuted && e.stmt == Some(8)).unwrap();
    let s = slice_all(&g, &model, &events[..=first_8]);
    assert_eq!(stmts(&s, 8, "n"), [1, 2, 3, 6, 7, 8, 11, 12, 13, 14]);
    assert_eq!(s.lookup(&Criterion::new(16, "n")), Err(LookupError::NotExecuted { stmt: 16 }));
}

#[test]
fn nothing_is_executed_initially() {
    let (_, model, g) = setup(PRIME_EXAMPLE);
    let s = Slicer::new(&g, &model);
    assert_eq!(s.marks(), g.static_marks());
    assert!(s.executed().is_empty());
    assert_eq!(s.stored_elements(), 0);
    assert_eq!(s.lookup(&Criterion::new(16, "n")), Err(LookupError::NotExecuted { stmt: 16 }));
}

#[test]
fn single_statement_program() {
    let (unit, model, g) = setup("class A { static void main() { int x = 1; } }");
    let s = slice_all(&g, &model, &events(&unit, &g, &[]));
    assert_eq!(stmts(&s, 2, "x"), [1, 2]);
}

#[test]
fn lookup_is_read_only() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let s = slice_all(&g, &model, &events(&unit, &g, &[7]));
    let before = (s.state().clone(), g.edge_visits());
    for stmt in 1..=16 {
        let _ = s.lookup(&Criterion::new(stmt, "n"));
    }
    assert_eq!((s.state().clone(), g.edge_visits()), before);
}

#[test]
fn marks_cover_the_exercised_edges() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let s = slice_all(&g, &model, &events(&unit, &g, &[7]));
    let marked: Vec<&crate::aosg::Edge> = g.edges().iter().filter(|e| s.marks()[e.id as usize]).collect();
    assert!(marked.iter().any(|e| e.kind == EdgeKind::AdviceEdge));
    assert!(marked.iter().any(|e| e.kind == EdgeKind::AspectMembership));
    assert!(marked.iter().any(|e| e.kind == EdgeKind::Call));
    // statement 5 never ran, so nothing flows into it
    let v5 = g.stmt_vertex(5).unwrap();
    assert!(g.in_edges(v5).all(|e| s.marks()[e.id as usize] == e.static_mark));
}

#[test]
fn loop_iterations_unmark_stale_definitions() {
    let src = "class A { static void main() { int x = 0; int i = 0; while (i < 3) { x = x + i; i = i + 1; } System.out.println(x); } }";
    let (unit, model, g) = setup(src);
    let s = slice_all(&g, &model, &events(&unit, &g, &[]));
    // 2: x = 0 no longer reaches 5 after the first iteration
    let v2 = g.stmt_vertex(2).unwrap();
    let v5 = g.stmt_vertex(5).unwrap();
    let e25 = g.find_edge(v2, v5, EdgeKind::DataDep, Some(&Var::local("x"))).unwrap();
    assert!(!s.marks()[e25 as usize]);
    assert_eq!(stmts(&s, 7, "x"), [1, 2, 3, 4, 5, 6, 7]);
}

#[test]
fn per_variable_slices_differ() {
    let src = "class A { static void main() { int a = 1; int b = 2; int c = a + b; } }";
    let (unit, model, g) = setup(src);
    let s = slice_all(&g, &model, &events(&unit, &g, &[]));
    assert_eq!(stmts(&s, 4, "a"), [1, 2, 4]);
    assert_eq!(stmts(&s, 4, "b"), [1, 3, 4]);
    assert_eq!(stmts(&s, 4, "c"), [1, 2, 3, 4]);
}

#[test]
fn rejects_events_out_of_context() {
    let (unit, model, g) = setup(PRIME_EXAMPLE);
    let events = events(&unit, &g, &[7]);
    let mut s = Slicer::new(&g, &model);
    let stmt = events.iter().find(|e| e.kind == EventKind::StatementExecuted).unwrap();
    assert!(s.apply(stmt).is_err());
}
