//! Trace-based dynamic slicing, kept deliberately naive.
//!
//! The whole event stream is turned into a trace of occurrences, each linked
//! to the earlier occurrences it depends on. A slice is the set of statements
//! reachable backwards from the criterion's last occurrence. Nothing is
//! precomputed, so every query walks the trace.

use std::collections::{BTreeSet, HashMap};

use crate::interp::{CallRef, Dep, Event, EventKind, Value};
use crate::lang::{Scope, StmtId, Var};
use crate::model::ProgramModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("malformed event stream at event {seq}: {message}")]
    Malformed { seq: u64, message: String },
    #[error("statement {stmt} was not executed")]
    NotExecuted { stmt: StmtId },
    #[error("statement {stmt} neither uses nor defines `{var}`")]
    UnknownVariable { stmt: StmtId, var: String },
}

/// What a trace entry stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Aspect,
    Statement,
    Pointcut,
    Advice,
    Entry,
    /// The call expression with its arguments evaluated.
    CallSite,
    /// A `return` that did not run because of how a predicate went.
    UntakenReturn,
    /// Value a body hands back to its caller.
    Result,
    /// Value of a call expression after any after-advice.
    CallValue,
}

impl EntryKind {
    /// Entries that are real executions of a numbered construct.
    pub fn is_occurrence(self) -> bool {
        matches!(
            self,
            EntryKind::Aspect | EntryKind::Statement | EntryKind::Pointcut | EntryKind::Advice | EntryKind::Entry
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub index: usize,
    pub kind: EntryKind,
    pub stmt: Option<StmtId>,
    pub defined: Vec<(Var, Value)>,
    pub used: Vec<Var>,
    /// Occurrence this entry is control dependent on.
    pub control: Option<usize>,
    /// Every entry the value of this one was computed from, `control` included.
    pub sources: Vec<usize>,
    /// Variables read while evaluating a statement with the definition each read saw.
    pub reads: Vec<(Var, Option<usize>)>,
    /// Values of the calls the statement's own expressions consumed.
    pub call_values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
}

struct Activation {
    header: StmtId,
    entry: usize,
    locals: HashMap<String, usize>,
    latest: HashMap<StmtId, usize>,
    last: Option<usize>,
    reads: Vec<(Var, Option<usize>)>,
    calls: HashMap<u32, usize>,
}

struct PendingCall {
    call: CallRef,
    site: usize,
    pointcut: Option<usize>,
    before_done: Option<usize>,
    entry: Option<usize>,
    result: Option<usize>,
    after_done: Option<usize>,
    created: bool,
}

struct Builder<'m> {
    model: &'m ProgramModel,
    entries: Vec<TraceEntry>,
    globals: HashMap<String, usize>,
    aspects: HashMap<StmtId, usize>,
    stack: Vec<Activation>,
    calls: Vec<PendingCall>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        kind: EntryKind,
        stmt: Option<StmtId>,
        control: Option<usize>,
        mut sources: Vec<usize>,
    ) -> usize {
        let index = self.entries.len();
        sources.extend(control);
        self.entries.push(TraceEntry {
            index,
            kind,
            stmt,
            defined: Vec::new(),
            used: Vec::new(),
            control,
            sources,
            reads: Vec::new(),
            call_values: Vec::new(),
        });
        index
    }

    fn top(&mut self) -> Result<&mut Activation, String> {
        self.stack.last_mut().ok_or_else(|| "no activation".into())
    }

    fn call(&mut self, call: Option<CallRef>) -> Result<&mut PendingCall, String> {
        match self.calls.last_mut() {
            Some(c) if Some(c.call) == call => Ok(c),
            _ => Err(format!("{call:?} is not the innermost call")),
        }
    }

    fn control_of(&mut self, stmt: StmtId) -> Result<usize, String> {
        let parent = self.model.control_parent.get(&stmt).copied();
        let act = self.top()?;
        match parent {
            Some(p) if p != act.header => {
                act.latest.get(&p).copied().ok_or_else(|| format!("{stmt} before its parent {p}"))
            }
            _ => Ok(act.entry),
        }
    }

    fn resolve(&mut self, dep: Dep) -> Result<Option<usize>, String> {
        let act = self.top()?;
        match dep {
            Dep::Read(i) => act.reads.get(i as usize).map(|r| r.1).ok_or_else(|| format!("no read {i}")),
            Dep::Call(k) => act.calls.get(&k).map(|&c| Some(c)).ok_or_else(|| format!("no call value {k}")),
        }
    }

    fn record_reads(&mut self, e: &Event) -> Result<(), String> {
        for r in &e.reads {
            let def = match r.var.scope {
                Scope::Static => self.globals.get(&r.var.name).copied(),
                Scope::Local => self.top()?.locals.get(&r.var.name).copied(),
            };
            self.top()?.reads.push((r.var.clone(), def));
        }
        Ok(())
    }

    fn open(&mut self, header: StmtId, entry: usize, defined: &[(Var, Value)]) {
        let locals = defined.iter().map(|(v, _)| (v.name.clone(), entry)).collect();
        self.stack.push(Activation {
            header,
            entry,
            locals,
            latest: HashMap::new(),
            last: None,
            reads: Vec::new(),
            calls: HashMap::new(),
        });
    }

    fn close(&mut self, header: StmtId) -> Result<Activation, String> {
        let act = self.stack.pop().ok_or("no activation to close")?;
        if act.header != header {
            return Err(format!("closing {header} while {} is open", act.header));
        }
        Ok(act)
    }

    /// Innermost predicates enclosing `stmt` within its body.
    fn predicates_around(&self, stmt: StmtId, header: StmtId) -> Vec<StmtId> {
        let mut out = Vec::new();
        let mut cur = self.model.control_parent.get(&stmt).copied();
        while let Some(p) = cur.filter(|&p| p != header) {
            if self.model.predicates.contains(&p) {
                out.push(p);
            }
            cur = self.model.control_parent.get(&p).copied();
        }
        out
    }

    fn step(&mut self, e: &Event) -> Result<(), String> {
        let stmt = e.stmt;
        let need = || stmt.ok_or_else(|| format!("{:?} without statement", e.kind));
        match e.kind {
            EventKind::AspectInstantiated => {
                let a = need()?;
                let i = self.push(EntryKind::Aspect, stmt, None, vec![]);
                self.aspects.insert(a, i);
            }
            EventKind::StatementExecuted => {
                let s = need()?;
                self.record_reads(e)?;
                let control = self.control_of(s)?;
                let mut sources = Vec::new();
                let mut call_values = Vec::new();
                for &d in &e.deps {
                    if let Some(x) = self.resolve(d)? {
                        sources.push(x);
                        if let Dep::Call(_) = d {
                            call_values.push(x);
                        }
                    }
                }
                let i = self.push(EntryKind::Statement, stmt, Some(control), sources);
                let act = self.stack.last_mut().expect("activation");
                let reads = std::mem::take(&mut act.reads);
                act.calls.clear();
                act.latest.insert(s, i);
                act.last = Some(i);
                for (v, _) in &e.defined {
                    match v.scope {
                        Scope::Static => self.globals.insert(v.name.clone(), i),
                        Scope::Local => act.locals.insert(v.name.clone(), i),
                    };
                }
                let entry = &mut self.entries[i];
                entry.reads = reads;
                entry.call_values = call_values;
                entry.defined = e.defined.clone();
                entry.used = e.used.clone();
            }
            EventKind::CallBegin => {
                let s = need()?;
                let call = e.call.ok_or("call without reference")?;
                self.record_reads(e)?;
                let control = self.control_of(s)?;
                let mut sources = Vec::new();
                for &d in e.args.iter().flatten().chain(&e.deps) {
                    sources.extend(self.resolve(d)?);
                }
                let site = self.push(EntryKind::CallSite, stmt, Some(control), sources);
                self.calls.push(PendingCall {
                    call,
                    site,
                    pointcut: None,
                    before_done: None,
                    entry: None,
                    result: None,
                    after_done: None,
                    created: false,
                });
            }
            EventKind::JoinPointMatched => {
                let p = need()?;
                let aspect = self.model.owner.get(&p).copied().ok_or("pointcut without aspect")?;
                let a = *self.aspects.get(&aspect).ok_or("aspect not instantiated")?;
                let site = self.call(e.call)?.site;
                let i = self.push(EntryKind::Pointcut, stmt, None, vec![site, a]);
                self.call(e.call)?.pointcut = Some(i);
            }
            EventKind::AdviceEntered => {
                let c = self.call(e.call)?;
                let pc = c.pointcut.ok_or("advice without pointcut")?;
                // after advice is the only one entered once the callee returned
                let sources: Vec<usize> = [Some(pc), c.result].into_iter().flatten().collect();
                let i = self.push(EntryKind::Advice, stmt, None, sources);
                self.entries[i].defined = e.defined.clone();
                self.open(need()?, i, &e.defined);
            }
            EventKind::AdviceExited => {
                let act = self.close(need()?)?;
                let done = act.last.unwrap_or(act.entry);
                let c = self.call(e.call)?;
                if c.result.is_some() {
                    c.after_done = Some(done);
                } else {
                    c.before_done = Some(done);
                }
            }
            EventKind::MethodEntered => {
                let m = need()?;
                let sources = match e.call {
                    None => vec![],
                    Some(_) => {
                        let c = self.call(e.call)?;
                        [Some(c.site), c.before_done].into_iter().flatten().collect()
                    }
                };
                let i = self.push(EntryKind::Entry, stmt, None, sources);
                self.entries[i].defined = e.defined.clone();
                if e.call.is_some() {
                    self.call(e.call)?.entry = Some(i);
                }
                self.open(m, i, &e.defined);
            }
            EventKind::MethodExited => {
                let m = need()?;
                let act = self.close(m)?;
                let mut sources = Vec::new();
                if let Some(r) = e.returned_by {
                    sources.push(*act.latest.get(&r).ok_or("return not executed")?);
                }
                let returns = self.model.body(m).map(|b| b.returns.clone()).unwrap_or_default();
                for r in returns.into_iter().filter(|&r| Some(r) != e.returned_by) {
                    let decided = self.predicates_around(r, m).into_iter().find_map(|q| act.latest.get(&q).copied());
                    if let Some(q) = decided {
                        sources.push(self.push(EntryKind::UntakenReturn, Some(r), None, vec![q]));
                    }
                }
                let result = self.push(EntryKind::Result, None, None, sources);
                if e.call.is_some() {
                    self.call(e.call)?.result = Some(result);
                }
            }
            EventKind::ObjectCreated => self.call(e.call)?.created = true,
            EventKind::CallEnd => {
                let c = self.calls.pop().ok_or("call end without call")?;
                if Some(c.call) != e.call {
                    return Err(format!("call end for {:?} while {:?} is open", e.call, c.call));
                }
                let sources: Vec<usize> = if c.created {
                    // the object is what the constructor was entered with, or the bare expression
                    vec![c.entry.unwrap_or(c.site)]
                } else {
                    [c.result, c.after_done].into_iter().flatten().collect()
                };
                let v = self.push(EntryKind::CallValue, None, None, sources);
                self.top()?.calls.insert(c.call.index, v);
            }
        }
        Ok(())
    }
}

impl Trace {
    pub fn build(model: &ProgramModel, events: &[Event]) -> Result<Trace, OracleError> {
        let mut b = Builder {
            model,
            entries: Vec::new(),
            globals: HashMap::new(),
            aspects: HashMap::new(),
            stack: Vec::new(),
            calls: Vec::new(),
        };
        for e in events {
            b.step(e).map_err(|message| OracleError::Malformed { seq: e.seq, message })?;
        }
        Ok(Trace { entries: b.entries })
    }

    /// Number of executions of `stmt` in the trace.
    pub fn occurrences(&self, stmt: StmtId) -> usize {
        self.entries.iter().filter(|e| e.kind.is_occurrence() && e.stmt == Some(stmt)).count()
    }

    /// Statements that occur in the trace, ascending.
    pub fn executed(&self) -> BTreeSet<StmtId> {
        self.entries.iter().filter(|e| e.kind.is_occurrence()).filter_map(|e| e.stmt).collect()
    }

    fn closure(&self, roots: &[usize], out: &mut BTreeSet<StmtId>) {
        let mut seen = vec![false; self.entries.len()];
        let mut stack = roots.to_vec();
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            out.extend(self.entries[i].stmt);
            stack.extend(&self.entries[i].sources);
        }
    }

    /// Statements affecting `var` at the last execution of `stmt`.
    ///
    /// For a variable the statement reads, only the definitions of that
    /// variable, the statement's control context and the calls it consumed
    /// are followed; for one it only writes, everything the statement depends on.
    pub fn slice(&self, model: &ProgramModel, stmt: StmtId, var: &str) -> Result<BTreeSet<StmtId>, OracleError> {
        let last = self
            .entries
            .iter()
            .rev()
            .find(|e| e.kind.is_occurrence() && e.stmt == Some(stmt))
            .ok_or(OracleError::NotExecuted { stmt })?;
        let (v, used) = model
            .def_use
            .criterion_var(stmt, var)
            .ok_or_else(|| OracleError::UnknownVariable { stmt, var: var.to_string() })?;
        let mut out = BTreeSet::from([stmt]);
        if used && last.kind == EntryKind::Statement {
            let mut roots: Vec<usize> = last.control.into_iter().collect();
            roots.extend(last.reads.iter().filter(|(r, _)| *r == v).filter_map(|(_, d)| *d));
            roots.extend(&last.call_values);
            self.closure(&roots, &mut out);
        } else {
            self.closure(&[last.index], &mut out);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aosg::Aosg;
    use crate::interp::{run_collect, RunConfig};
    use crate::lang::{parse_source, PRIME_EXAMPLE};

    fn trace(src: &str, input: &[i64]) -> (ProgramModel, Trace) {
        let unit = parse_source("t.maj", src).unwrap();
        let model = ProgramModel::build(&unit).unwrap();
        let g = Aosg::build(&unit, &model);
        let (x, events) = run_collect(&unit, &g, input, RunConfig::default());
        assert_eq!(x.error, None);
        let t = Trace::build(&model, &events).unwrap();
        (model, t)
    }

    #[test]
    fn prime_seven_golden() {
        let (model, t) = trace(PRIME_EXAMPLE, &[7]);
        let s: Vec<_> = t.slice(&model, 16, "n").unwrap().into_iter().collect();
        assert_eq!(s, [1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16]);
        assert_eq!(t.occurrences(7), 3);
        assert_eq!(t.occurrences(8), 2);
        assert_eq!(t.slice(&model, 5, "n"), Err(OracleError::NotExecuted { stmt: 5 }));
    }

    #[test]
    fn prime_four_takes_the_early_return_once() {
        let (_, t) = trace(PRIME_EXAMPLE, &[4]);
        assert_eq!(t.occurrences(9), 1);
        assert_eq!(t.occurrences(10), 0);
    }

    #[test]
    fn straight_line_precision() {
        let (model, t) = trace("class A { static void main() { int x = 1; int y = 2; System.out.println(y); } }", &[]);
        assert_eq!(t.slice(&model, 4, "y").unwrap(), BTreeSet::from([1, 3, 4]));
        assert_eq!(t.occurrences(4), 1);
    }

    #[test]
    fn same_trace_same_slice() {
        let (model, t) = trace(PRIME_EXAMPLE, &[97]);
        for s in t.executed() {
            for v in ["n", "i", "result"] {
                assert_eq!(t.slice(&model, s, v), t.slice(&model, s, v));
            }
        }
    }
}
