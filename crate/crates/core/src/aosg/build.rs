use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::atomic::AtomicU64;

use serde::Serialize;

use super::*;
use crate::lang::{walk_stmts, AdviceKind, BodyRef, Expr, Scope, SourceUnit, Stmt, StmtKind};
use crate::model::ProgramModel;

/// Construction-time identity of a vertex, independent of final numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum VertexKey {
    Stmt { stmt: StmtId },
    ActualIn { stmt: StmtId, index: u32, pos: u32 },
    ActualOut { stmt: StmtId, index: u32 },
    FormalIn { header: StmtId, pos: u32 },
    FormalOut { header: StmtId },
    CNode { stmt: StmtId, index: u32 },
}

#[derive(Debug, Clone)]
struct CallDraft {
    stmt: StmtId,
    index: u32,
    callee: Option<StmtId>,
    is_new: bool,
    argc: u32,
}

type EdgeDraft = (VertexKey, VertexKey, EdgeKind, Option<Var>);

/// One side of the graph before weaving: vertices and edges named by key.
#[derive(Debug, Clone)]
pub struct PartialGraph {
    pub side: Side,
    vertices: Vec<(VertexKey, VertexKind, StmtId)>,
    edges: Vec<EdgeDraft>,
    calls: Vec<CallDraft>,
    static_defs: Vec<(VertexKey, Var)>,
    static_uses: Vec<(VertexKey, Var)>,
    formal_keys: BTreeMap<StmtId, (Vec<VertexKey>, Option<VertexKey>)>,
}

impl PartialGraph {
    fn new(side: Side) -> Self {
        PartialGraph {
            side,
            vertices: Vec::new(),
            edges: Vec::new(),
            calls: Vec::new(),
            static_defs: Vec::new(),
            static_uses: Vec::new(),
            formal_keys: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.2 == kind).count()
    }

    fn vertex(&mut self, key: VertexKey, kind: VertexKind, owner: StmtId) {
        self.vertices.push((key, kind, owner));
    }

    fn edge(&mut self, from: VertexKey, to: VertexKey, kind: EdgeKind, var: Option<Var>) {
        self.edges.push((from, to, kind, var));
    }
}

fn stmt_key(stmt: StmtId) -> VertexKey {
    VertexKey::Stmt { stmt }
}

/// Variables read by `e` outside nested calls, and the call indices of the
/// outermost nested calls.
fn direct_reads(e: &Expr, vars: &mut Vec<Var>, calls: &mut Vec<u32>) {
    match e {
        Expr::Var(v) => vars.push(v.var()),
        Expr::ArgRead(_) => vars.push(Var::local("args")),
        Expr::Unary(_, x) => direct_reads(x, vars, calls),
        Expr::Binary(_, l, r) => {
            direct_reads(l, vars, calls);
            direct_reads(r, vars, calls);
        }
        Expr::Call(c) => calls.push(c.index),
        Expr::New(n) => calls.push(n.index),
        Expr::Int(_) | Expr::Bool(_) => {}
    }
}

fn callee_header<'e>(unit: &SourceUnit, e: &'e Expr) -> (Option<StmtId>, bool, &'e [Expr], u32) {
    match e {
        Expr::Call(c) => (unit.method(&c.method).map(|m| m.number), false, &c.args, c.index),
        Expr::New(n) => (unit.class().and_then(|c| c.constructor.as_ref()).map(|m| m.number), true, &n.args, n.index),
        _ => unreachable!("only calls are call sites"),
    }
}

fn add_body(g: &mut PartialGraph, unit: &SourceUnit, model: &ProgramModel, body: BodyRef<'_>) {
    let header = body.number();
    let entry_kind = if body.is_aspect_side() { VertexKind::AdviceEntry } else { VertexKind::MethodEntry };
    g.vertex(stmt_key(header), entry_kind, header);

    let mut formal_in = Vec::new();
    for (pos, p) in body.formals().iter().enumerate() {
        let key = VertexKey::FormalIn { header, pos: pos as u32 };
        g.vertex(key, VertexKind::FormalIn, header);
        g.edge(key, stmt_key(header), EdgeKind::DataDep, Some(Var::local(p.name.clone())));
        formal_in.push(key);
    }
    let formal_out = if body.is_aspect_side() {
        None
    } else {
        let key = VertexKey::FormalOut { header };
        g.vertex(key, VertexKind::FormalOut, header);
        Some(key)
    };
    g.formal_keys.insert(header, (formal_in, formal_out));

    let bm = model.body(header).expect("model covers every body");
    let mut stmts: Vec<&Stmt> = Vec::new();
    walk_stmts(body.body(), &mut |s| stmts.push(s));
    for s in stmts {
        let calls = s.calls();
        let kind = if s.kind.is_predicate() {
            VertexKind::Predicate
        } else if !calls.is_empty() {
            VertexKind::CallSite
        } else {
            VertexKind::Statement
        };
        g.vertex(stmt_key(s.number), kind, header);
        if let Some(&p) = bm.control_parent.get(&s.number) {
            g.edge(stmt_key(p), stmt_key(s.number), EdgeKind::ControlDep, None);
        }
        let reaching = bm.reaching.get(&s.number);
        if let Some(r) = reaching {
            for (v, defs) in r {
                for &d in defs {
                    g.edge(stmt_key(d), stmt_key(s.number), EdgeKind::DataDep, Some(v.clone()));
                }
            }
        }
        let du = model.def_use.get(s.number).expect("def/use for every statement");
        for v in du.uses.iter().filter(|v| v.scope == Scope::Static) {
            g.static_uses.push((stmt_key(s.number), v.clone()));
        }
        for v in du.defs.iter().filter(|v| v.scope == Scope::Static) {
            g.static_defs.push((stmt_key(s.number), v.clone()));
        }
        if let StmtKind::Return(_) = s.kind {
            g.edge(stmt_key(s.number), VertexKey::FormalOut { header }, EdgeKind::DataDep, None);
        }
        for call in calls {
            let (callee, is_new, args, index) = callee_header(unit, call);
            let out = VertexKey::ActualOut { stmt: s.number, index };
            for (pos, a) in args.iter().enumerate() {
                let ain = VertexKey::ActualIn { stmt: s.number, index, pos: pos as u32 };
                g.vertex(ain, VertexKind::ActualIn, header);
                let mut vars = Vec::new();
                let mut nested = Vec::new();
                direct_reads(a, &mut vars, &mut nested);
                vars.sort();
                vars.dedup();
                for v in vars {
                    match v.scope {
                        Scope::Static => g.static_uses.push((ain, v)),
                        Scope::Local => {
                            let defs = reaching.and_then(|r| r.get(&v)).cloned().unwrap_or_default();
                            for d in defs {
                                g.edge(stmt_key(d), ain, EdgeKind::DataDep, Some(v.clone()));
                            }
                        }
                    }
                }
                for k in nested {
                    g.edge(VertexKey::ActualOut { stmt: s.number, index: k }, ain, EdgeKind::DataDep, None);
                }
            }
            g.vertex(out, VertexKind::ActualOut, header);
            g.calls.push(CallDraft { stmt: s.number, index, callee, is_new, argc: args.len() as u32 });
        }
        // results of the outermost calls flow into the statement itself
        let mut nested = Vec::new();
        for e in s.own_exprs() {
            direct_reads(e, &mut Vec::new(), &mut nested);
        }
        for k in nested {
            g.edge(VertexKey::ActualOut { stmt: s.number, index: k }, stmt_key(s.number), EdgeKind::DataDep, None);
        }
    }
}

/// Dependence graph of the base code: one method dependence graph per method
/// and constructor, linked at call sites.
pub fn build_sdg(unit: &SourceUnit, model: &ProgramModel) -> PartialGraph {
    let mut g = PartialGraph::new(Side::Base);
    for body in unit.bodies().into_iter().filter(|b| !b.is_aspect_side()) {
        add_body(&mut g, unit, model, body);
    }
    link_calls(&mut g);
    g
}

/// Call and parameter edges for calls whose callee lives in the same partial graph.
fn link_calls(g: &mut PartialGraph) {
    let calls = g.calls.clone();
    for c in calls {
        let Some(callee) = c.callee else { continue };
        let Some((fin, fout)) = g.formal_keys.get(&callee).cloned() else { continue };
        let kind = if c.is_new { EdgeKind::MethodEntryEdge } else { EdgeKind::Call };
        g.edge(stmt_key(c.stmt), stmt_key(callee), kind, None);
        for pos in 0..c.argc {
            g.edge(
                VertexKey::ActualIn { stmt: c.stmt, index: c.index, pos },
                fin[pos as usize],
                EdgeKind::ParamIn,
                None,
            );
        }
        if let Some(fout) = fout {
            g.edge(fout, VertexKey::ActualOut { stmt: c.stmt, index: c.index }, EdgeKind::ParamOut, None);
        }
    }
}

/// Dependence graph of the aspect code: aspect entries, pointcut start vertices
/// and advice dependence graphs.
pub fn build_adg(unit: &SourceUnit, model: &ProgramModel) -> PartialGraph {
    let mut g = PartialGraph::new(Side::Aspect);
    for aspect in &unit.aspects {
        g.vertex(stmt_key(aspect.number), VertexKind::AspectEntry, aspect.number);
        let mut items: Vec<(StmtId, bool)> = aspect
            .pointcuts
            .iter()
            .map(|p| (p.number, true))
            .chain(aspect.advices.iter().map(|a| (a.number, false)))
            .collect();
        items.sort();
        for (number, is_pointcut) in items {
            if is_pointcut {
                let pc = aspect.pointcuts.iter().find(|p| p.number == number).expect("pointcut");
                g.vertex(stmt_key(pc.number), VertexKind::PointcutStart, aspect.number);
                g.edge(stmt_key(aspect.number), stmt_key(pc.number), EdgeKind::ControlDep, None);
                let mut fin = Vec::new();
                for pos in 0..pc.params.len() as u32 {
                    let key = VertexKey::FormalIn { header: pc.number, pos };
                    g.vertex(key, VertexKind::FormalIn, pc.number);
                    fin.push(key);
                }
                g.formal_keys.insert(pc.number, (fin, None));
            } else {
                let adv = aspect.advices.iter().find(|a| a.number == number).expect("advice");
                add_body(&mut g, unit, model, BodyRef::Advice(aspect, adv));
                let pc = aspect.pointcuts.iter().find(|p| p.name == adv.pointcut).expect("checked pointcut");
                g.edge(stmt_key(pc.number), stmt_key(adv.number), EdgeKind::AdviceEdge, None);
                for (i, name) in adv.pointcut_args.iter().enumerate() {
                    let j = adv.params.iter().position(|p| &p.name == name).expect("checked binding");
                    g.edge(
                        VertexKey::FormalIn { header: pc.number, pos: i as u32 },
                        VertexKey::FormalIn { header: adv.number, pos: j as u32 },
                        EdgeKind::ParamIn,
                        None,
                    );
                }
            }
        }
    }
    link_calls(&mut g);
    g
}

/// A call site selected by a pointcut, before vertex ids are assigned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedCall {
    pub site_stmt: StmtId,
    pub call_index: u32,
    pub callee: StmtId,
    pub pointcut_stmt: StmtId,
    pub bindings: Vec<(u32, u32)>,
    pub before: Option<StmtId>,
    pub after: Option<StmtId>,
    pub after_result_pos: Option<u32>,
}

/// Tests every call site against every pointcut designator.
pub fn match_join_points(unit: &SourceUnit) -> Vec<MatchedCall> {
    let mut out = Vec::new();
    let Some(class) = unit.class() else { return out };
    for body in unit.bodies() {
        walk_stmts(body.body(), &mut |s| {
            for call in s.calls() {
                let Expr::Call(c) = call else { continue };
                let Some(m) = unit.method(&c.method) else { continue };
                for aspect in &unit.aspects {
                    for pc in &aspect.pointcuts {
                        let d = &pc.designator;
                        let param_types: Vec<_> = m.params.iter().map(|p| p.ty.clone()).collect();
                        if d.class != class.name || d.method != m.name || d.ret != m.ret || d.param_types != param_types
                        {
                            continue;
                        }
                        let bindings = d
                            .args
                            .iter()
                            .enumerate()
                            .map(|(pos, name)| {
                                let ppos = pc.params.iter().position(|p| &p.name == name).expect("checked binding");
                                (pos as u32, ppos as u32)
                            })
                            .collect();
                        let find = |kind| aspect.advices.iter().find(|a| a.pointcut == pc.name && a.kind == kind);
                        let after = find(AdviceKind::AfterReturning);
                        out.push(MatchedCall {
                            site_stmt: s.number,
                            call_index: c.index,
                            callee: m.number,
                            pointcut_stmt: pc.number,
                            bindings,
                            before: find(AdviceKind::Before).map(|a| a.number),
                            after: after.map(|a| a.number),
                            after_result_pos: after.map(|a| a.params.len() as u32),
                        });
                    }
                }
            }
        });
    }
    out
}

/// Joins the two sides at the matched call sites and freezes the graph.
pub fn weave(sdg: PartialGraph, adg: PartialGraph, matches: &[MatchedCall]) -> Aosg {
    let mut vertices: Vec<(VertexKey, VertexKind, StmtId, Side)> = Vec::new();
    let mut drafts: Vec<EdgeDraft> = Vec::new();
    let mut calls = Vec::new();
    let mut static_defs = Vec::new();
    let mut static_uses = Vec::new();
    let mut formal_keys = BTreeMap::new();
    let mut owner_of: HashMap<VertexKey, StmtId> = HashMap::new();
    for g in [&sdg, &adg] {
        for &(k, kind, owner) in &g.vertices {
            vertices.push((k, kind, owner, g.side));
            owner_of.insert(k, owner);
        }
        drafts.extend(g.edges.iter().cloned());
        calls.extend(g.calls.iter().cloned());
        static_defs.extend(g.static_defs.iter().cloned());
        static_uses.extend(g.static_uses.iter().cloned());
        formal_keys.extend(g.formal_keys.iter().map(|(k, v)| (*k, v.clone())));
    }

    // calls that cross from advice code into base methods
    for c in calls.iter().filter(|c| adg.vertices.iter().any(|v| v.0 == stmt_key(c.stmt))) {
        let Some(callee) = c.callee else { continue };
        if adg.formal_keys.contains_key(&callee) {
            continue;
        }
        let Some((fin, fout)) = formal_keys.get(&callee).cloned() else { continue };
        let kind = if c.is_new { EdgeKind::MethodEntryEdge } else { EdgeKind::Call };
        drafts.push((stmt_key(c.stmt), stmt_key(callee), kind, None));
        for pos in 0..c.argc {
            drafts.push((
                VertexKey::ActualIn { stmt: c.stmt, index: c.index, pos },
                fin[pos as usize],
                EdgeKind::ParamIn,
                None,
            ));
        }
        if let Some(fout) = fout {
            drafts.push((fout, VertexKey::ActualOut { stmt: c.stmt, index: c.index }, EdgeKind::ParamOut, None));
        }
    }

    // static fields: every definition may reach every use
    let mut defs_by_var: BTreeMap<&Var, Vec<VertexKey>> = BTreeMap::new();
    for (k, v) in &static_defs {
        defs_by_var.entry(v).or_default().push(*k);
    }
    for (u, v) in &static_uses {
        for d in defs_by_var.get(v).into_iter().flatten() {
            drafts.push((*d, *u, EdgeKind::DataDep, Some(v.clone())));
        }
    }

    // aspect membership, C-nodes and parameter bindings at each match
    let advice_stmts = |header: StmtId| -> Vec<VertexKey> {
        adg.vertices
            .iter()
            .filter(|(k, _, owner)| *owner == header && matches!(k, VertexKey::Stmt { .. }))
            .map(|(k, ..)| *k)
            .collect()
    };
    for m in matches {
        let site = stmt_key(m.site_stmt);
        let cnode = VertexKey::CNode { stmt: m.site_stmt, index: m.call_index };
        let site_owner = owner_of[&site];
        vertices.push((cnode, VertexKind::CNode, site_owner, Side::Aspect));
        drafts.push((site, stmt_key(m.pointcut_stmt), EdgeKind::AspectMembership, None));
        for &(apos, ppos) in &m.bindings {
            drafts.push((
                VertexKey::ActualIn { stmt: m.site_stmt, index: m.call_index, pos: apos },
                VertexKey::FormalIn { header: m.pointcut_stmt, pos: ppos },
                EdgeKind::ParamIn,
                None,
            ));
        }
        for adv in m.before.iter().chain(m.after.iter()) {
            drafts.push((cnode, stmt_key(*adv), EdgeKind::ControlDep, None));
            for k in advice_stmts(*adv) {
                drafts.push((k, cnode, EdgeKind::WeavingOrder, None));
            }
        }
        drafts.push((cnode, stmt_key(m.callee), EdgeKind::ControlDep, None));
        drafts.push((
            cnode,
            VertexKey::ActualOut { stmt: m.site_stmt, index: m.call_index },
            EdgeKind::WeavingOrder,
            None,
        ));
        if let (Some(after), Some(rpos)) = (m.after, m.after_result_pos) {
            drafts.push((
                VertexKey::FormalOut { header: m.callee },
                VertexKey::FormalIn { header: after, pos: rpos },
                EdgeKind::ParamOut,
                None,
            ));
        }
    }

    add_summary_edges(&mut drafts, &calls, &formal_keys, &owner_of);

    // freeze: assign ids, sort and deduplicate edges
    let index: HashMap<VertexKey, VertexId> = vertices.iter().enumerate().map(|(i, v)| (v.0, i as VertexId)).collect();
    let resolve = |k: &VertexKey| *index.get(k).unwrap_or_else(|| panic!("edge endpoint {k:?} has no vertex"));
    let mut resolved: Vec<(VertexId, VertexId, EdgeKind, Option<Var>)> =
        drafts.iter().map(|(f, t, k, v)| (resolve(f), resolve(t), *k, v.clone())).collect();
    resolved.sort();
    resolved.dedup();

    let max_stmt = vertices
        .iter()
        .filter_map(|v| match v.0 {
            VertexKey::Stmt { stmt } => Some(stmt),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut stmt_vertex = vec![None; max_stmt as usize + 1];
    let verts: Vec<Vertex> = vertices
        .iter()
        .enumerate()
        .map(|(i, &(key, kind, owner, side))| {
            let stmt = match key {
                VertexKey::Stmt { stmt } => {
                    stmt_vertex[stmt as usize] = Some(i as VertexId);
                    Some(stmt)
                }
                _ => None,
            };
            Vertex { id: i as VertexId, kind, stmt, owner, side, key }
        })
        .collect();

    let mut out_adj = vec![Vec::new(); verts.len()];
    let mut in_adj = vec![Vec::new(); verts.len()];
    let mut edge_index = HashMap::new();
    let edges: Vec<Edge> = resolved
        .into_iter()
        .enumerate()
        .map(|(i, (from, to, kind, var))| {
            let id = i as EdgeId;
            out_adj[from as usize].push(id);
            in_adj[to as usize].push(id);
            edge_index.insert((from, to, kind, var.clone()), id);
            Edge { id, from, to, kind, var, static_mark: kind == EdgeKind::ControlDep }
        })
        .collect();

    let mut formals = BTreeMap::new();
    for (header, (fin, fout)) in &formal_keys {
        formals.insert(
            *header,
            Formals { formal_in: fin.iter().map(&resolve).collect(), formal_out: fout.as_ref().map(&resolve) },
        );
    }

    let jps: Vec<JoinPointMatch> = matches
        .iter()
        .map(|m| JoinPointMatch {
            site: resolve(&stmt_key(m.site_stmt)),
            site_stmt: m.site_stmt,
            call_index: m.call_index,
            pointcut: resolve(&stmt_key(m.pointcut_stmt)),
            pointcut_stmt: m.pointcut_stmt,
            bindings: m.bindings.clone(),
            before: m.before.map(|b| resolve(&stmt_key(b))),
            after: m.after.map(|a| resolve(&stmt_key(a))),
            cnode: resolve(&VertexKey::CNode { stmt: m.site_stmt, index: m.call_index }),
        })
        .collect();

    let mut call_sites = BTreeMap::new();
    for c in &calls {
        let jp = jps.iter().position(|j| j.site_stmt == c.stmt && j.call_index == c.index);
        call_sites.insert(
            (c.stmt, c.index),
            CallSiteInfo {
                stmt: c.stmt,
                index: c.index,
                callee: c.callee.map(|h| resolve(&stmt_key(h))),
                callee_stmt: c.callee,
                is_new: c.is_new,
                actual_in: (0..c.argc)
                    .map(|pos| resolve(&VertexKey::ActualIn { stmt: c.stmt, index: c.index, pos }))
                    .collect(),
                actual_out: resolve(&VertexKey::ActualOut { stmt: c.stmt, index: c.index }),
                join_point: jp,
            },
        );
    }

    Aosg {
        vertices: verts,
        edges,
        out_adj,
        in_adj,
        stmt_vertex,
        call_sites,
        matches: jps,
        formals,
        edge_index,
        edge_visits: AtomicU64::new(0),
    }
}

/// Adds actual-in → actual-out summary edges wherever the callee's result
/// transitively depends on the corresponding formal, iterating to a fixpoint
/// so that summaries of nested calls are taken into account.
fn add_summary_edges(
    drafts: &mut Vec<EdgeDraft>,
    calls: &[CallDraft],
    formal_keys: &BTreeMap<StmtId, (Vec<VertexKey>, Option<VertexKey>)>,
    owner_of: &HashMap<VertexKey, StmtId>,
) {
    let mut adj: HashMap<VertexKey, Vec<VertexKey>> = HashMap::new();
    let mut formal_uses: HashMap<(StmtId, Var), Vec<VertexKey>> = HashMap::new();
    for (f, t, k, v) in drafts.iter() {
        match k {
            EdgeKind::DataDep | EdgeKind::ControlDep | EdgeKind::Summary => {
                if let (VertexKey::Stmt { stmt }, Some(var)) = (f, v) {
                    if formal_keys.contains_key(stmt) && *k == EdgeKind::DataDep {
                        formal_uses.entry((*stmt, var.clone())).or_default().push(*t);
                        continue;
                    }
                }
                if matches!(f, VertexKey::Stmt { stmt } if formal_keys.contains_key(stmt)) {
                    // edges out of an entry do not carry a particular formal
                    continue;
                }
                adj.entry(*f).or_default().push(*t);
            }
            _ => {}
        }
    }
    let formal_name: HashMap<VertexKey, Var> = drafts
        .iter()
        .filter(|(f, t, k, _)| {
            *k == EdgeKind::DataDep && matches!(f, VertexKey::FormalIn { .. }) && matches!(t, VertexKey::Stmt { .. })
        })
        .filter_map(|(f, _, _, v)| v.clone().map(|v| (*f, v)))
        .collect();

    let mut done: HashSet<(VertexKey, VertexKey)> = HashSet::new();
    loop {
        let mut added = false;
        for (&header, (fin, fout)) in formal_keys {
            let Some(fout) = fout else { continue };
            for (pos, fk) in fin.iter().enumerate() {
                let Some(var) = formal_name.get(fk) else { continue };
                let starts = formal_uses.get(&(header, var.clone())).cloned().unwrap_or_default();
                let mut seen: BTreeSet<VertexKey> = BTreeSet::new();
                let mut queue: VecDeque<VertexKey> = starts.into_iter().collect();
                let mut reaches = false;
                while let Some(v) = queue.pop_front() {
                    if owner_of.get(&v) != Some(&header) || !seen.insert(v) {
                        continue;
                    }
                    if v == *fout {
                        reaches = true;
                        break;
                    }
                    for &w in adj.get(&v).into_iter().flatten() {
                        queue.push_back(w);
                    }
                }
                if !reaches {
                    continue;
                }
                for c in calls.iter().filter(|c| c.callee == Some(header) && (pos as u32) < c.argc) {
                    let ain = VertexKey::ActualIn { stmt: c.stmt, index: c.index, pos: pos as u32 };
                    let aout = VertexKey::ActualOut { stmt: c.stmt, index: c.index };
                    if done.insert((ain, aout)) {
                        drafts.push((ain, aout, EdgeKind::Summary, None));
                        adj.entry(ain).or_default().push(aout);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
}
