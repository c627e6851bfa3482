//! Dynamic slicing by edge marking.
//!
//! The slicer consumes the interpreter's events in order. After each event it
//! updates the dynamic mark of every AOSG edge the event exercised and
//! materializes the dynamic slice of the executed vertex, so a slicing command
//! is answered by looking up a stored set.

mod stmtset;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

pub use stmtset::StmtSet;

use crate::aosg::{Aosg, EdgeId, EdgeKind, VertexId, VertexKey, VertexKind};
use crate::interp::{CallRef, Dep, Event, EventKind, EventSink, Read, SinkError};
use crate::lang::{Scope, StmtId, Var};
use crate::model::ProgramModel;

/// A slicing command: a statement number and a variable name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Criterion {
    pub stmt: StmtId,
    pub var: String,
}

impl Criterion {
    pub fn new(stmt: StmtId, var: impl Into<String>) -> Self {
        Criterion { stmt, var: var.into() }
    }
}

/// Statements of a dynamic slice, ascending. Always contains the criterion statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Slice {
    pub criterion: Criterion,
    pub stmts: Vec<StmtId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LookupError {
    #[error("there is no statement {stmt}")]
    UnknownStatement { stmt: StmtId },
    #[error("statement {stmt} was not executed")]
    NotExecuted { stmt: StmtId },
    #[error("statement {stmt} neither uses nor defines `{var}`")]
    UnknownVariable { stmt: StmtId, var: String },
}

/// An event that does not fit the graph or the execution seen so far.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("slicer invariant violated at event {seq}: {message}")]
pub struct InvariantViolation {
    pub seq: u64,
    pub message: String,
}

/// Why an edge was marked; a re-execution unmarks the marks of the same
/// target and role left by the previous execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Role {
    Data,
    Call,
    ParamIn,
    Membership,
    Advice,
    BeforeDone,
    AfterDone,
    Value,
}

/// A materialized slice together with the statements that directly contributed to it.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Item {
    set: Arc<StmtSet>,
    labels: Vec<StmtId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Def {
    vertex: VertexId,
    stmt: StmtId,
    closure: Arc<StmtSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Pending {
    reads: Vec<(Var, Option<Def>)>,
    calls: HashMap<u32, Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Frame {
    header: StmtId,
    entry: Arc<StmtSet>,
    locals: HashMap<String, Def>,
    /// Latest slice of each statement executed in this activation.
    latest: HashMap<StmtId, Arc<StmtSet>>,
    last: Option<(VertexId, StmtId, Arc<StmtSet>)>,
    pending: Pending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ActiveCall {
    call: CallRef,
    is_new: bool,
    pre: Arc<StmtSet>,
    pointcut: Option<Arc<StmtSet>>,
    before_last: Option<(StmtId, Arc<StmtSet>)>,
    entry: Option<(StmtId, Arc<StmtSet>)>,
    result: Option<Item>,
    after_last: Option<(StmtId, Arc<StmtSet>)>,
}

/// The dslice sets of a vertex's latest execution.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Executed {
    full: Item,
    per_var: BTreeMap<Var, Item>,
}

impl Executed {
    fn size(&self) -> usize {
        self.full.set.len() + self.per_var.values().map(|i| i.set.len()).sum::<usize>()
    }
}

/// Run-time state: dynamic edge marks, RecentDef and the dslice sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceState {
    marks: Vec<bool>,
    marked_by: HashMap<(VertexId, Role), Vec<EdgeId>>,
    globals: HashMap<String, Def>,
    frames: Vec<Frame>,
    calls: Vec<ActiveCall>,
    aspects: HashMap<StmtId, Arc<StmtSet>>,
    dslice: Vec<Option<Executed>>,
    stored: usize,
    events: u64,
}

/// Static facts the slicer needs, extracted once from the graph and model.
#[derive(Debug, Clone)]
struct Layout {
    max_stmt: StmtId,
    cd_parent: Vec<Option<StmtId>>,
    /// Per body: each `return` with its enclosing predicates, innermost first.
    returns: HashMap<StmtId, Vec<(StmtId, Vec<StmtId>)>>,
    uses: Vec<BTreeSet<Var>>,
}

impl Layout {
    fn new(g: &Aosg, model: &ProgramModel) -> Layout {
        let max_stmt = g.stmt_count();
        let mut cd_parent = vec![None; max_stmt as usize + 1];
        for e in g.edges().iter().filter(|e| e.kind == EdgeKind::ControlDep) {
            let (from, to) = (g.vertex(e.from), g.vertex(e.to));
            if let (VertexKey::Stmt { stmt: p }, VertexKey::Stmt { stmt: s }) = (from.key, to.key) {
                cd_parent[s as usize] = Some(p);
            }
        }
        let mut returns: HashMap<StmtId, Vec<(StmtId, Vec<StmtId>)>> = HashMap::new();
        for s in 1..=max_stmt {
            let Some(v) = g.stmt_vertex(s) else { continue };
            let header = g.vertex(v).owner;
            let Some(fout) = g.formals(header).and_then(|f| f.formal_out) else { continue };
            if g.find_edge(v, fout, EdgeKind::DataDep, None).is_none() {
                continue;
            }
            let mut preds = Vec::new();
            let mut cur = cd_parent[s as usize];
            while let Some(p) = cur.filter(|&p| p != header) {
                if let Some(pv) = g.stmt_vertex(p) {
                    if g.vertex(pv).kind == VertexKind::Predicate {
                        preds.push(p);
                    }
                }
                cur = cd_parent[p as usize];
            }
            returns.entry(header).or_default().push((s, preds));
        }
        let mut uses = vec![BTreeSet::new(); max_stmt as usize + 1];
        for (&s, du) in &model.def_use.per_stmt {
            if (s as usize) < uses.len() {
                uses[s as usize] = du.uses.clone();
            }
        }
        Layout { max_stmt, cd_parent, returns, uses }
    }
}

fn singleton(s: StmtId, max: StmtId) -> StmtSet {
    let mut set = StmtSet::with_max(max);
    set.insert(s);
    set
}

/// Edge-marking dynamic slicer over a frozen AOSG.
#[derive(Debug, Clone)]
pub struct Slicer<'g> {
    graph: &'g Aosg,
    model: &'g ProgramModel,
    layout: Layout,
    state: SliceState,
}

type SResult<T> = Result<T, String>;

impl<'g> Slicer<'g> {
    /// Initial state: control edges marked, everything else unmarked, no
    /// definitions and no slices.
    pub fn new(graph: &'g Aosg, model: &'g ProgramModel) -> Self {
        let layout = Layout::new(graph, model);
        let state = SliceState {
            marks: graph.static_marks(),
            marked_by: HashMap::new(),
            globals: HashMap::new(),
            frames: Vec::new(),
            calls: Vec::new(),
            aspects: HashMap::new(),
            dslice: vec![None; layout.max_stmt as usize + 1],
            stored: 0,
            events: 0,
        };
        Slicer { graph, model, layout, state }
    }

    pub fn state(&self) -> &SliceState {
        &self.state
    }

    /// Current dynamic mark of every edge, indexed by edge id.
    pub fn marks(&self) -> &[bool] {
        &self.state.marks
    }

    /// Total number of statement numbers held in all stored dslice sets.
    pub fn stored_elements(&self) -> usize {
        self.state.stored
    }

    pub fn events_seen(&self) -> u64 {
        self.state.events
    }

    /// Statements executed so far, ascending.
    pub fn executed(&self) -> Vec<StmtId> {
        (0..self.state.dslice.len() as StmtId).filter(|&s| self.state.dslice[s as usize].is_some()).collect()
    }

    /// Statement holding the most recent definition of `var` visible in the
    /// innermost activation; `None` if it has not been defined yet.
    pub fn recent_def(&self, var: &Var) -> Option<StmtId> {
        match var.scope {
            Scope::Static => self.state.globals.get(&var.name).map(|d| d.stmt),
            Scope::Local => self.state.frames.last()?.locals.get(&var.name).map(|d| d.stmt),
        }
    }

    fn item(&self, c: &Criterion) -> Result<&Item, LookupError> {
        if c.stmt == 0 || c.stmt > self.layout.max_stmt {
            return Err(LookupError::UnknownStatement { stmt: c.stmt });
        }
        let ex = self.state.dslice[c.stmt as usize].as_ref().ok_or(LookupError::NotExecuted { stmt: c.stmt })?;
        let (var, used) = self
            .model
            .def_use
            .criterion_var(c.stmt, &c.var)
            .ok_or_else(|| LookupError::UnknownVariable { stmt: c.stmt, var: c.var.clone() })?;
        Ok(if used { ex.per_var.get(&var).unwrap_or(&ex.full) } else { &ex.full })
    }

    /// Answers a slicing command from the stored sets. Touches no graph edge
    /// and does not modify the state.
    pub fn lookup(&self, c: &Criterion) -> Result<Slice, LookupError> {
        let item = self.item(c)?;
        Ok(Slice { criterion: c.clone(), stmts: item.set.to_vec() })
    }

    /// Statements whose slices were merged directly into the criterion's slice
    /// at its latest execution.
    pub fn contributors(&self, c: &Criterion) -> Result<BTreeSet<StmtId>, LookupError> {
        Ok(self.item(c)?.labels.iter().copied().collect())
    }

    /// Processes one event.
    pub fn apply(&mut self, e: &Event) -> Result<(), InvariantViolation> {
        self.check_vertex(e)
            .and_then(|()| self.dispatch(e))
            .map_err(|message| InvariantViolation { seq: e.seq, message })?;
        self.state.events += 1;
        Ok(())
    }

    fn check_vertex(&self, e: &Event) -> SResult<()> {
        if e.vertex as usize >= self.graph.vertex_count() {
            return Err(format!("unknown vertex {}", e.vertex));
        }
        let v = self.graph.vertex(e.vertex);
        let expected = match e.kind {
            EventKind::CallEnd => None,
            _ => e.stmt,
        };
        if expected.is_some() && v.stmt != expected {
            return Err(format!("vertex {} is not the vertex of statement {:?}", e.vertex, e.stmt));
        }
        Ok(())
    }

    fn dispatch(&mut self, e: &Event) -> SResult<()> {
        match e.kind {
            EventKind::AspectInstantiated => self.on_aspect(e),
            EventKind::StatementExecuted => self.on_statement(e),
            EventKind::CallBegin => self.on_call_begin(e),
            EventKind::JoinPointMatched => self.on_join_point(e),
            EventKind::AdviceEntered => self.on_advice_entered(e),
            EventKind::AdviceExited => self.on_advice_exited(e),
            EventKind::MethodEntered => self.on_method_entered(e),
            EventKind::MethodExited => self.on_method_exited(e),
            EventKind::ObjectCreated => Ok(()),
            EventKind::CallEnd => self.on_call_end(e),
        }
    }

    fn stmt_of(e: &Event) -> SResult<StmtId> {
        e.stmt.ok_or_else(|| format!("{:?} event without a statement", e.kind))
    }

    fn new_set(&self) -> StmtSet {
        StmtSet::with_max(self.layout.max_stmt)
    }

    fn store(&mut self, stmt: StmtId, ex: Executed) {
        let slot = &mut self.state.dslice[stmt as usize];
        if let Some(old) = slot.as_ref() {
            self.state.stored -= old.size();
        }
        self.state.stored += ex.size();
        *slot = Some(ex);
    }

    fn frame(&self) -> SResult<&Frame> {
        self.state.frames.last().ok_or_else(|| "no active frame".to_string())
    }

    fn frame_mut(&mut self) -> SResult<&mut Frame> {
        self.state.frames.last_mut().ok_or_else(|| "no active frame".to_string())
    }

    fn active_call(&mut self, call: Option<CallRef>) -> SResult<&mut ActiveCall> {
        let top = self.state.calls.last_mut().ok_or_else(|| "no active call".to_string())?;
        if Some(top.call) != call {
            return Err(format!("event for call {call:?} while {:?} is active", top.call));
        }
        Ok(top)
    }

    fn recent(&self, var: &Var) -> SResult<Option<Def>> {
        Ok(match var.scope {
            Scope::Static => self.state.globals.get(&var.name).cloned(),
            Scope::Local => self.frame()?.locals.get(&var.name).cloned(),
        })
    }

    fn define(&mut self, var: &Var, def: Def) -> SResult<()> {
        match var.scope {
            Scope::Static => {
                self.state.globals.insert(var.name.clone(), def);
            }
            Scope::Local => {
                self.frame_mut()?.locals.insert(var.name.clone(), def);
            }
        }
        Ok(())
    }

    /// Resolves newly reported reads against the current definitions.
    fn take_reads(&mut self, reads: &[Read]) -> SResult<()> {
        for r in reads {
            let def = self.recent(&r.var)?;
            let pending = &mut self.frame_mut()?.pending;
            if r.id as usize != pending.reads.len() {
                return Err(format!("read {} reported out of order", r.id));
            }
            pending.reads.push((r.var.clone(), def));
        }
        Ok(())
    }

    /// Slice of the control-dependence parent of `stmt` in the current activation.
    fn control(&self, stmt: StmtId) -> SResult<(StmtId, Arc<StmtSet>)> {
        let frame = self.frame()?;
        let parent = self.layout.cd_parent[stmt as usize].unwrap_or(frame.header);
        if parent == frame.header {
            return Ok((parent, frame.entry.clone()));
        }
        let set = frame
            .latest
            .get(&parent)
            .cloned()
            .ok_or_else(|| format!("statement {stmt} runs before its control parent {parent}"))?;
        Ok((parent, set))
    }

    fn dep_item(&self, d: Dep) -> SResult<Option<(Arc<StmtSet>, Vec<StmtId>)>> {
        let pending = &self.frame()?.pending;
        Ok(match d {
            Dep::Read(id) => {
                let (_, def) = pending.reads.get(id as usize).ok_or_else(|| format!("unknown read {id}"))?;
                def.as_ref().map(|d| (d.closure.clone(), vec![d.stmt]))
            }
            Dep::Call(k) => {
                let item = pending.calls.get(&k).ok_or_else(|| format!("result of call {k} is not available"))?;
                Some((item.set.clone(), item.labels.clone()))
            }
        })
    }

    fn edge(&self, from: VertexId, to: VertexId, kind: EdgeKind, var: Option<&Var>) -> SResult<EdgeId> {
        self.graph.find_edge(from, to, kind, var).ok_or_else(|| {
            let var = var.map(|v| format!(" for {v}")).unwrap_or_default();
            format!("no {kind} edge {from} -> {to}{var}")
        })
    }

    /// Replaces the marks left on `target` for `role` by its previous execution.
    fn remark(&mut self, target: VertexId, role: Role, edges: Vec<EdgeId>) {
        if let Some(old) = self.state.marked_by.remove(&(target, role)) {
            for e in old {
                self.state.marks[e as usize] = self.graph.edge(e).static_mark;
            }
        }
        for &e in &edges {
            self.state.marks[e as usize] = true;
        }
        self.state.marked_by.insert((target, role), edges);
    }

    fn on_aspect(&mut self, e: &Event) -> SResult<()> {
        let a = Self::stmt_of(e)?;
        let set = Arc::new(singleton(a, self.layout.max_stmt));
        self.state.aspects.insert(a, set.clone());
        self.store(a, Executed { full: Item { set, labels: Vec::new() }, per_var: BTreeMap::new() });
        Ok(())
    }

    fn on_statement(&mut self, e: &Event) -> SResult<()> {
        let u = Self::stmt_of(e)?;
        self.take_reads(&e.reads)?;
        let (parent, control) = self.control(u)?;

        let mut full = singleton(u, self.layout.max_stmt);
        full.union_with(&control);
        let mut labels = vec![parent];
        let mut results = Vec::new();
        for &d in &e.deps {
            if let Some((set, l)) = self.dep_item(d)? {
                full.union_with(&set);
                labels.extend(&l);
                if let Dep::Call(_) = d {
                    results.push((set, l));
                }
            }
        }

        let frame = self.frame()?;
        let mut per_var = BTreeMap::new();
        for var in &self.layout.uses[u as usize] {
            let mut set = singleton(u, self.layout.max_stmt);
            set.union_with(&control);
            let mut vl = vec![parent];
            for (v, def) in &frame.pending.reads {
                if let (true, Some(d)) = (v == var, def) {
                    set.union_with(&d.closure);
                    vl.push(d.stmt);
                }
            }
            for (s, l) in &results {
                set.union_with(s);
                vl.extend(l);
            }
            per_var.insert(var.clone(), Item { set: Arc::new(set), labels: vl });
        }

        let uv = e.vertex;
        let mut data = Vec::new();
        for (v, def) in &frame.pending.reads {
            if let Some(d) = def {
                data.push(self.edge(d.vertex, uv, EdgeKind::DataDep, Some(v))?);
            }
        }
        for d in &e.deps {
            if let Dep::Call(k) = d {
                let site = self.graph.call_site(u, *k).ok_or_else(|| format!("no call site {u}#{k}"))?;
                data.push(self.edge(site.actual_out, uv, EdgeKind::DataDep, None)?);
            }
        }
        data.sort_unstable();
        data.dedup();
        self.remark(uv, Role::Data, data);

        let full = Arc::new(full);
        self.store(u, Executed { full: Item { set: full.clone(), labels }, per_var });
        let frame = self.frame_mut()?;
        frame.latest.insert(u, full.clone());
        frame.last = Some((uv, u, full.clone()));
        frame.pending = Pending::default();
        for (var, _) in &e.defined {
            self.define(var, Def { vertex: uv, stmt: u, closure: full.clone() })?;
        }
        Ok(())
    }

    fn on_call_begin(&mut self, e: &Event) -> SResult<()> {
        let u = Self::stmt_of(e)?;
        let call = e.call.ok_or("call event without a call reference")?;
        self.take_reads(&e.reads)?;
        let (_, control) = self.control(u)?;
        let mut pre = singleton(u, self.layout.max_stmt);
        pre.union_with(&control);
        for &d in e.args.iter().flatten().chain(&e.deps) {
            if let Some((set, _)) = self.dep_item(d)? {
                pre.union_with(&set);
            }
        }
        let site =
            self.graph.call_site(u, call.index).ok_or_else(|| format!("no call site {u}#{}", call.index))?.clone();
        if site.actual_in.len() != e.args.len() {
            return Err(format!(
                "call {u}#{} has {} arguments, event reports {}",
                call.index,
                site.actual_in.len(),
                e.args.len()
            ));
        }

        for (pos, deps) in e.args.iter().enumerate() {
            let ain = site.actual_in[pos];
            let mut data = Vec::new();
            for &d in deps {
                let found = match d {
                    Dep::Read(id) => {
                        let (var, def) = &self.frame()?.pending.reads[id as usize];
                        def.as_ref().and_then(|def| self.graph.find_edge(def.vertex, ain, EdgeKind::DataDep, Some(var)))
                    }
                    Dep::Call(k) => match self.graph.call_site(u, k) {
                        Some(inner) => self.graph.find_edge(inner.actual_out, ain, EdgeKind::DataDep, None),
                        None => None,
                    },
                };
                data.extend(found);
            }
            self.remark(ain, Role::Data, data);
        }
        if let Some(callee) = site.callee {
            let kind = if site.is_new { EdgeKind::MethodEntryEdge } else { EdgeKind::Call };
            let c = self.edge(e.vertex, callee, kind, None)?;
            self.remark(callee, Role::Call, vec![c]);
            let header = site.callee_stmt.ok_or("callee without a header")?;
            let formals = self.graph.formals(header).ok_or_else(|| format!("no formals for {header}"))?.clone();
            for (pos, &ain) in site.actual_in.iter().enumerate() {
                let fin = formals.formal_in[pos];
                let p = self.edge(ain, fin, EdgeKind::ParamIn, None)?;
                self.remark(fin, Role::ParamIn, vec![p]);
            }
        }

        self.state.calls.push(ActiveCall {
            call,
            is_new: site.is_new,
            pre: Arc::new(pre),
            pointcut: None,
            before_last: None,
            entry: None,
            result: None,
            after_last: None,
        });
        Ok(())
    }

    fn join_point(&self, call: CallRef) -> SResult<crate::aosg::JoinPointMatch> {
        let site = self.graph.call_site(call.stmt, call.index).ok_or_else(|| format!("no call site {call:?}"))?;
        let jp = site.join_point.ok_or_else(|| format!("call {call:?} matches no pointcut"))?;
        Ok(self.graph.join_points()[jp].clone())
    }

    fn on_join_point(&mut self, e: &Event) -> SResult<()> {
        let p = Self::stmt_of(e)?;
        let call = self.active_call(e.call)?.call;
        let jp = self.join_point(call)?;
        if jp.pointcut != e.vertex {
            return Err(format!("call {call:?} is matched by {}, not {}", jp.pointcut, e.vertex));
        }
        let aspect = self.graph.vertex(e.vertex).owner;
        let aspect_set = self.state.aspects.get(&aspect).cloned().ok_or("pointcut of an uninstantiated aspect")?;
        let mut set = singleton(p, self.layout.max_stmt);
        set.union_with(&self.active_call(e.call)?.pre);
        set.union_with(&aspect_set);
        let set = Arc::new(set);
        self.active_call(e.call)?.pointcut = Some(set.clone());
        self.store(p, Executed { full: Item { set, labels: vec![call.stmt, aspect] }, per_var: BTreeMap::new() });

        let m = self.edge(jp.site, e.vertex, EdgeKind::AspectMembership, None)?;
        self.remark(e.vertex, Role::Membership, vec![m]);
        let site = self.graph.call_site(call.stmt, call.index).ok_or("call site")?.clone();
        let pc_formals = self.graph.formals(p).ok_or("pointcut formals")?.clone();
        for &(apos, ppos) in &jp.bindings {
            let fin = pc_formals.formal_in[ppos as usize];
            let edge = self.edge(site.actual_in[apos as usize], fin, EdgeKind::ParamIn, None)?;
            self.remark(fin, Role::ParamIn, vec![edge]);
        }
        Ok(())
    }

    fn enter_frame(
        &mut self,
        header: StmtId,
        vertex: VertexId,
        entry: Arc<StmtSet>,
        defined: &[(Var, crate::interp::Value)],
    ) {
        let locals = defined
            .iter()
            .map(|(v, _)| (v.name.clone(), Def { vertex, stmt: header, closure: entry.clone() }))
            .collect();
        self.state.frames.push(Frame {
            header,
            entry,
            locals,
            latest: HashMap::new(),
            last: None,
            pending: Pending::default(),
        });
    }

    /// Marks the formal-in → entry edges of a body being entered.
    fn mark_formals(
        &mut self,
        header: StmtId,
        entry: VertexId,
        defined: &[(Var, crate::interp::Value)],
    ) -> SResult<()> {
        let formals = self.graph.formals(header).ok_or_else(|| format!("no formals for {header}"))?.clone();
        if formals.formal_in.len() != defined.len() {
            return Err(format!(
                "body {header} binds {} values for {} formals",
                defined.len(),
                formals.formal_in.len()
            ));
        }
        let mut data = Vec::new();
        for (fin, (var, _)) in formals.formal_in.iter().zip(defined) {
            data.push(self.edge(*fin, entry, EdgeKind::DataDep, Some(var))?);
        }
        self.remark(entry, Role::Data, data);
        Ok(())
    }

    fn on_advice_entered(&mut self, e: &Event) -> SResult<()> {
        let a = Self::stmt_of(e)?;
        let call = self.active_call(e.call)?.clone();
        let jp = self.join_point(call.call)?;
        let after = jp.after == Some(e.vertex);
        if !after && jp.before != Some(e.vertex) {
            return Err(format!("advice {a} does not apply to call {:?}", call.call));
        }
        let pc = call.pointcut.as_ref().ok_or("advice entered before its pointcut matched")?;
        let mut set = singleton(a, self.layout.max_stmt);
        set.union_with(pc);
        let mut labels = vec![jp.pointcut_stmt];
        if after {
            let r = call.result.as_ref().ok_or("after advice entered before the method returned")?;
            set.union_with(&r.set);
            labels.extend(&r.labels);
        }
        let set = Arc::new(set);
        self.store(a, Executed { full: Item { set: set.clone(), labels }, per_var: BTreeMap::new() });

        let adv = self.edge(jp.pointcut, e.vertex, EdgeKind::AdviceEdge, None)?;
        self.remark(e.vertex, Role::Advice, vec![adv]);
        let formals = self.graph.formals(a).ok_or("advice formals")?.clone();
        let callee_out = call_callee_out(self.graph, call.call);
        for &fin in &formals.formal_in {
            let incoming: Vec<EdgeId> = self
                .graph
                .in_edges(fin)
                .filter(|x| {
                    (x.kind == EdgeKind::ParamIn && self.graph.vertex(x.from).owner == jp.pointcut_stmt)
                        || (x.kind == EdgeKind::ParamOut && Some(x.from) == callee_out)
                })
                .map(|x| x.id)
                .collect();
            if incoming.len() != 1 {
                return Err(format!("advice {a} formal {fin} has {} bindings", incoming.len()));
            }
            self.remark(fin, Role::ParamIn, incoming);
        }
        self.mark_formals(a, e.vertex, &e.defined)?;
        self.enter_frame(a, e.vertex, set, &e.defined);
        Ok(())
    }

    fn on_advice_exited(&mut self, e: &Event) -> SResult<()> {
        let a = Self::stmt_of(e)?;
        let frame = self.state.frames.pop().ok_or("advice exit without a frame")?;
        if frame.header != a {
            return Err(format!("advice {a} exits while {} is active", frame.header));
        }
        let (lv, ls, lset) = frame.last.unwrap_or((e.vertex, a, frame.entry.clone()));
        let call = self.active_call(e.call)?.call;
        let jp = self.join_point(call)?;
        let w = self.edge(lv, jp.cnode, EdgeKind::WeavingOrder, None)?;
        let role = if jp.after == Some(e.vertex) {
            self.active_call(e.call)?.after_last = Some((ls, lset));
            Role::AfterDone
        } else {
            self.active_call(e.call)?.before_last = Some((ls, lset));
            Role::BeforeDone
        };
        self.remark(jp.cnode, role, vec![w]);
        Ok(())
    }

    fn on_method_entered(&mut self, e: &Event) -> SResult<()> {
        let m = Self::stmt_of(e)?;
        let mut set = singleton(m, self.layout.max_stmt);
        let mut labels = Vec::new();
        if e.call.is_some() {
            let call = self.active_call(e.call)?;
            set.union_with(&call.pre);
            labels.push(call.call.stmt);
            if let Some((s, b)) = &call.before_last {
                set.union_with(b);
                labels.push(*s);
            }
        }
        let set = Arc::new(set);
        if e.call.is_some() {
            self.active_call(e.call)?.entry = Some((m, set.clone()));
        }
        self.store(m, Executed { full: Item { set: set.clone(), labels }, per_var: BTreeMap::new() });
        self.mark_formals(m, e.vertex, &e.defined)?;
        self.enter_frame(m, e.vertex, set, &e.defined);
        Ok(())
    }

    fn on_method_exited(&mut self, e: &Event) -> SResult<()> {
        let m = Self::stmt_of(e)?;
        let frame = self.state.frames.pop().ok_or("method exit without a frame")?;
        if frame.header != m {
            return Err(format!("method {m} exits while {} is active", frame.header));
        }
        let mut set = self.new_set();
        let mut labels = Vec::new();
        if let Some(r) = e.returned_by {
            let rs = frame.latest.get(&r).ok_or_else(|| format!("return {r} did not execute"))?;
            set.union_with(rs);
            labels.push(r);
            let rv = self.graph.stmt_vertex(r).ok_or("return vertex")?;
            let fout = self.graph.formals(m).and_then(|f| f.formal_out).ok_or("method without formal-out")?;
            let edge = self.edge(rv, fout, EdgeKind::DataDep, None)?;
            self.remark(fout, Role::Data, vec![edge]);
        }
        // returns that were not taken because of a predicate outcome
        for (r, preds) in self.layout.returns.get(&m).into_iter().flatten() {
            if Some(*r) == e.returned_by {
                continue;
            }
            if let Some(q) = preds.iter().find_map(|q| frame.latest.get(q)) {
                set.union_with(q);
                set.insert(*r);
                labels.push(*r);
            }
        }
        if e.call.is_some() {
            self.active_call(e.call)?.result = Some(Item { set: Arc::new(set), labels });
        }
        Ok(())
    }

    fn on_call_end(&mut self, e: &Event) -> SResult<()> {
        let call = self.active_call(e.call)?.clone();
        self.state.calls.pop();
        let value = if call.is_new {
            match call.entry {
                Some((ctor, set)) => Item { set, labels: vec![ctor] },
                None => Item { set: call.pre.clone(), labels: Vec::new() },
            }
        } else {
            let r = call.result.ok_or("call ended without a method result")?;
            let mut set = (*r.set).clone();
            let mut labels = r.labels;
            if let Some((s, after)) = &call.after_last {
                set.union_with(after);
                labels.push(*s);
            }
            Item { set: Arc::new(set), labels }
        };
        self.frame_mut()?.pending.calls.insert(call.call.index, value);

        let site = self.graph.call_site(call.call.stmt, call.call.index).ok_or("call site")?.clone();
        if site.actual_out != e.vertex {
            return Err(format!("call end reported at vertex {} instead of {}", e.vertex, site.actual_out));
        }
        let mut edges = Vec::new();
        if let Some(header) = site.callee_stmt {
            if let Some(fout) = self.graph.formals(header).and_then(|f| f.formal_out) {
                edges.push(self.edge(fout, site.actual_out, EdgeKind::ParamOut, None)?);
            }
        }
        if let Some(jp) = site.join_point {
            let cnode = self.graph.join_points()[jp].cnode;
            edges.push(self.edge(cnode, site.actual_out, EdgeKind::WeavingOrder, None)?);
        }
        for &ain in &site.actual_in {
            edges.extend(self.graph.find_edge(ain, site.actual_out, EdgeKind::Summary, None));
        }
        self.remark(site.actual_out, Role::Value, edges);
        Ok(())
    }
}

fn call_callee_out(g: &Aosg, call: CallRef) -> Option<VertexId> {
    let header = g.call_site(call.stmt, call.index)?.callee_stmt?;
    g.formals(header)?.formal_out
}

impl EventSink for Slicer<'_> {
    fn event(&mut self, event: &Event) -> Result<(), SinkError> {
        self.apply(event).map_err(|e| SinkError(e.to_string()))
    }
}

#[cfg(test)]
mod tests;
