use std::collections::BTreeSet;

use super::*;
use crate::lang::{parse_source, PRIME_EXAMPLE};
use crate::model::ProgramModel;

fn graph(src: &str) -> Aosg {
    let unit = parse_source("t.maj", src).unwrap();
    let model = ProgramModel::build(&unit).unwrap();
    Aosg::build(&unit, &model)
}

fn prime() -> Aosg {
    graph(PRIME_EXAMPLE)
}

/// (source description, edge kind) for every edge into the vertex of `stmt`.
fn parents(g: &Aosg, to: VertexId) -> BTreeSet<(String, EdgeKind)> {
    g.in_edges(to).map(|e| (describe(g, e.from), e.kind)).collect()
}

fn describe(g: &Aosg, v: VertexId) -> String {
    match g.vertex(v).key {
        VertexKey::Stmt { stmt } => stmt.to_string(),
        VertexKey::ActualIn { stmt, index, pos } => format!("ain{stmt}.{index}.{pos}"),
        VertexKey::ActualOut { stmt, index } => format!("aout{stmt}.{index}"),
        VertexKey::FormalIn { header, pos } => format!("fin{header}.{pos}"),
        VertexKey::FormalOut { header } => format!("fout{header}"),
        VertexKey::CNode { stmt, index } => format!("c{stmt}.{index}"),
    }
}

fn set(items: &[(&str, EdgeKind)]) -> BTreeSet<(String, EdgeKind)> {
    items.iter().map(|(s, k)| (s.to_string(), *k)).collect()
}

fn sv(g: &Aosg, stmt: u32) -> VertexId {
    g.stmt_vertex(stmt).unwrap()
}

#[test]
fn every_statement_has_one_vertex() {
    let g = prime();
    for s in 1..=16 {
        let hits = g.vertices().iter().filter(|v| v.stmt == Some(s)).count();
        assert_eq!(hits, 1, "statement {s}");
    }
    for v in g.vertices() {
        if v.kind.is_parameter() || v.kind == VertexKind::CNode {
            assert_eq!(v.stmt, None);
        }
    }
}

#[test]
fn aspect_side_vertices() {
    let g = prime();
    let kind = |s| g.vertex(sv(&g, s)).kind;
    assert_eq!(kind(11), VertexKind::AspectEntry);
    assert_eq!(kind(12), VertexKind::PointcutStart);
    assert_eq!(kind(13), VertexKind::AdviceEntry);
    assert_eq!(kind(15), VertexKind::AdviceEntry);
    assert_eq!(kind(14), VertexKind::Statement);
    assert_eq!(kind(3), VertexKind::Predicate);
    assert_eq!(kind(1), VertexKind::MethodEntry);
    let find = |a, b, k| g.find_edge(sv(&g, a), sv(&g, b), k, None).is_some();
    assert!(find(12, 13, EdgeKind::AdviceEdge));
    assert!(find(12, 15, EdgeKind::AdviceEdge));
    assert!(find(11, 12, EdgeKind::ControlDep));
    assert!(find(13, 14, EdgeKind::ControlDep));
    assert!(find(15, 16, EdgeKind::ControlDep));
    assert!(find(3, 6, EdgeKind::Call));
    // pointcuts have no body beneath them
    assert!(g.out_edges(sv(&g, 12)).all(|e| e.kind == EdgeKind::AdviceEdge));
}

#[test]
fn woven_parent_structure_of_prime() {
    use EdgeKind::*;
    let g = prime();
    assert_eq!(parents(&g, sv(&g, 6)), set(&[("3", Call), ("c3.0", ControlDep), ("fin6.0", DataDep)]));
    assert_eq!(parents(&g, sv(&g, 13)), set(&[("12", AdviceEdge), ("c3.0", ControlDep), ("fin13.0", DataDep)]));
    assert_eq!(
        parents(&g, sv(&g, 15)),
        set(&[("12", AdviceEdge), ("c3.0", ControlDep), ("fin15.0", DataDep), ("fin15.1", DataDep)])
    );
    assert_eq!(parents(&g, sv(&g, 12)), set(&[("11", ControlDep), ("3", AspectMembership)]));
    assert_eq!(parents(&g, sv(&g, 8)), set(&[("7", ControlDep), ("6", DataDep), ("7", DataDep)]));
    assert_eq!(parents(&g, sv(&g, 16)), set(&[("15", ControlDep), ("15", DataDep)]));
    assert_eq!(parents(&g, sv(&g, 14)), set(&[("13", ControlDep), ("13", DataDep)]));
    assert_eq!(parents(&g, sv(&g, 2)), set(&[("1", ControlDep), ("1", DataDep)]));
    assert_eq!(parents(&g, sv(&g, 3)), set(&[("1", ControlDep), ("2", DataDep), ("aout3.0", DataDep)]));

    let site = g.call_site(3, 0).unwrap();
    assert_eq!(
        parents(&g, site.actual_out),
        set(&[("fout6", ParamOut), ("c3.0", WeavingOrder), ("ain3.0.0", Summary)])
    );
    let after_result = g.formals(15).unwrap().formal_in[1];
    assert_eq!(parents(&g, after_result), set(&[("fout6", ParamOut)]));
    let fout = g.formals(6).unwrap().formal_out.unwrap();
    assert_eq!(parents(&g, fout), set(&[("9", DataDep), ("10", DataDep)]));
    let cnode = g.join_points()[0].cnode;
    assert_eq!(
        parents(&g, cnode),
        set(&[("13", WeavingOrder), ("14", WeavingOrder), ("15", WeavingOrder), ("16", WeavingOrder)])
    );
    let pc_formal = g.formals(12).unwrap().formal_in[0];
    assert_eq!(parents(&g, pc_formal), set(&[("ain3.0.0", ParamIn)]));
    assert_eq!(parents(&g, g.formals(13).unwrap().formal_in[0]), set(&[("fin12.0", ParamIn)]));
}

#[test]
fn one_membership_arc_and_bipartite() {
    let g = prime();
    let members: Vec<_> = g.edges().iter().filter(|e| e.kind == EdgeKind::AspectMembership).cloned().collect();
    assert_eq!(members.len(), 1);
    let e = &members[0];
    assert_eq!((g.vertex(e.from).stmt, g.vertex(e.to).stmt), (Some(3), Some(12)));
    assert_ne!(g.vertex(e.from).side, g.vertex(e.to).side);
    let jp = &g.join_points()[0];
    assert_eq!(jp.bindings, [(0, 0)]);
}

#[test]
fn static_marks_are_control_edges() {
    let g = prime();
    for e in g.edges() {
        assert_eq!(e.static_mark, e.kind == EdgeKind::ControlDep, "{e:?}");
    }
}

#[test]
fn summary_edge_at_isprime_call() {
    let g = prime();
    let site = g.call_site(3, 0).unwrap();
    assert!(g.find_edge(site.actual_in[0], site.actual_out, EdgeKind::Summary, None).is_some());
}

#[test]
fn summary_only_for_relevant_formals() {
    let g = graph(
        "class A { static int f(int a, int b) { int c = b; return a; } static void main() { int x = f(1, 2); } }",
    );
    let site = g.call_site(5, 0).unwrap();
    assert!(g.find_edge(site.actual_in[0], site.actual_out, EdgeKind::Summary, None).is_some());
    assert!(g.find_edge(site.actual_in[1], site.actual_out, EdgeKind::Summary, None).is_none());
}

#[test]
fn nested_calls_propagate_summaries() {
    let g = graph(
        "class A { static int id(int a) { return a; } static int twice(int b) { int c = id(b); return c + c; } static void main() { int x = twice(3); } }",
    );
    let site = g.call_site(7, 0).unwrap();
    assert!(g.find_edge(site.actual_in[0], site.actual_out, EdgeKind::Summary, None).is_some());
}

#[test]
fn no_calls_means_no_interprocedural_edges() {
    let g = graph("class A { static int x; static void main() { x = 1; x = x + 2; } }");
    let interproc = g
        .edges()
        .iter()
        .filter(|e| matches!(e.kind, EdgeKind::Call | EdgeKind::ParamIn | EdgeKind::ParamOut | EdgeKind::Summary))
        .count();
    assert_eq!(interproc, 0);
}

#[test]
fn zero_matches_is_disjoint_union() {
    let src = "class A { static int f(int a) { return a; } static int g(int a) { return a; } static void main() { int x = f(1); } }
aspect Asp { pointcut pg(int a): call(int A.g(int)) && args(a); before(int a): pg(a) { System.out.println(a); } }";
    let unit = parse_source("t.maj", src).unwrap();
    let model = ProgramModel::build(&unit).unwrap();
    let sdg = build_sdg(&unit, &model);
    let adg = build_adg(&unit, &model);
    let matches = match_join_points(&unit);
    assert!(matches.is_empty());
    let (nv, ne) = (sdg.vertex_count() + adg.vertex_count(), sdg.edge_count() + adg.edge_count());
    let g = weave(sdg, adg, &matches);
    assert_eq!(g.vertex_count(), nv);
    // Summaries are only computed once the sides are joined.
    let unsummarized = g.edges().iter().filter(|e| e.kind != EdgeKind::Summary).count();
    assert_eq!(unsummarized, ne);
}

#[test]
fn two_sites_two_matches() {
    let src = PRIME_EXAMPLE.replace("if (isprime(n))", "boolean first = isprime(n);\n        if (isprime(n + 1))");
    let g = graph(&src);
    let sites: Vec<_> = g.join_points().iter().map(|j| (j.site_stmt, j.pointcut_stmt)).collect();
    assert_eq!(sites, [(3, 13), (4, 13)]);
    let members = g.edges().iter().filter(|e| e.kind == EdgeKind::AspectMembership).count();
    assert_eq!(members, 2);
}

#[test]
fn dot_is_deterministic_with_one_membership_edge() {
    let a = prime().to_dot(None);
    let b = prime().to_dot(None);
    assert_eq!(a, b);
    assert_eq!(a.matches("label=\"AspectMembership\"").count(), 1);
    assert!(a.starts_with("digraph aosg {"));
    let empty = graph("").to_dot(None);
    assert!(!empty.contains("->") && !empty.contains(" v0 "));
}

#[test]
fn json_export_shape() {
    let j = prime().to_json();
    let v = j["vertices"].as_array().unwrap();
    let e = j["edges"].as_array().unwrap();
    assert!(!v.is_empty() && !e.is_empty());
    assert!(e.iter().all(|x| x["staticMark"].is_boolean()));
    assert_eq!(v[0]["stmt"], 1);
}

#[test]
fn edge_access_is_counted() {
    let g = prime();
    let before = g.edge_visits();
    let _ = g.out_edges(sv(&g, 7)).count();
    assert!(g.edge_visits() > before);
    let now = g.edge_visits();
    let _ = g.stmt_vertex(5);
    let _ = g.vertex(0);
    assert_eq!(g.edge_visits(), now);
}
