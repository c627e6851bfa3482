//! Tree-walking interpreter for checked MiniAJ programs, with advice woven in at
//! matched call sites. Execution is reported to an [`EventSink`].

mod event;

use std::collections::HashMap;

pub use event::{CallRef, Dep, Event, EventKind, EventSink, NdjsonSink, NullSink, Read, SinkError, Value};

use crate::aosg::{Aosg, VertexId};
use crate::lang::{
    AdviceDecl, BinaryOp, Block, Expr, MethodDecl, PrintPart, Scope, SourceUnit, Stmt, StmtId, StmtKind, Type, UnaryOp,
    Var, VarRef,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Maximum number of executed statements.
    pub step_budget: u64,
    /// Maximum number of simultaneously active method and advice bodies.
    pub max_depth: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { step_budget: 1_000_000, max_depth: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("statement {stmt}: division by zero")]
    DivisionByZero { stmt: StmtId },
    #[error("statement {stmt}: missing command-line argument {index}")]
    MissingArgument { stmt: StmtId, index: u32 },
    #[error("step budget of {budget} statements exceeded")]
    StepBudgetExceeded { budget: u64 },
    #[error("statement {stmt}: call depth limit of {limit} exceeded")]
    DepthExceeded { stmt: StmtId, limit: usize },
    #[error("the program has no `main` method")]
    NoMain,
    #[error("event consumer failed: {0}")]
    Sink(#[from] SinkError),
}

/// What a run produced. Events were delivered to the sink as they happened;
/// when `error` is set they stop at the point of failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: Vec<String>,
    pub steps: u64,
    pub events: u64,
    pub error: Option<RunError>,
}

/// Native stack reserved per level of MiniAJ call depth.
const STACK_PER_FRAME: usize = 64 * 1024;

/// Runs `main` with `input` as the command-line arguments.
///
/// Execution happens on a scoped thread whose stack is sized for
/// `config.max_depth`, so deep MiniAJ recursion cannot overflow the caller's stack.
pub fn run(
    unit: &SourceUnit,
    aosg: &Aosg,
    input: &[i64],
    config: RunConfig,
    sink: &mut (dyn EventSink + Send),
) -> Execution {
    let stack = (1 << 20) + config.max_depth.saturating_mul(STACK_PER_FRAME);
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("miniaj-interp".into())
            .stack_size(stack)
            .spawn_scoped(scope, || {
                let mut it = Interp::new(unit, aosg, input, config, sink);
                let result = it.run_main();
                Execution { output: it.output, steps: it.steps, events: it.seq, error: result.err() }
            })
            .expect("spawn interpreter thread")
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })
}

/// Runs to completion, collecting every event.
pub fn run_collect(unit: &SourceUnit, aosg: &Aosg, input: &[i64], config: RunConfig) -> (Execution, Vec<Event>) {
    let mut events = Vec::new();
    let exec = run(unit, aosg, input, config, &mut events);
    (exec, events)
}

type RResult<T> = Result<T, RunError>;

enum Flow {
    Normal,
    Return(StmtId, Option<Value>),
}

#[derive(Default)]
struct Frame {
    scopes: Vec<HashMap<String, Value>>,
}

impl Frame {
    fn get(&self, name: &str) -> Option<Value> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn set(&mut self, name: &str, v: Value) {
        for s in self.scopes.iter_mut().rev() {
            if let Some(slot) = s.get_mut(name) {
                *slot = v;
                return;
            }
        }
        panic!("assignment to undeclared local `{name}`");
    }

    fn declare(&mut self, name: &str, v: Value) {
        self.scopes.last_mut().expect("open scope").insert(name.to_string(), v);
    }
}

/// Evaluation state of the statement currently executing in a frame.
struct StmtCtx {
    number: StmtId,
    vertex: VertexId,
    reads: Vec<Read>,
    flushed: usize,
    used: Vec<Var>,
    /// Variables assigned earlier in the same event, with the dependences of
    /// the assigned value. Reading them again is not a use.
    written: Vec<(Var, Vec<Dep>)>,
    guards: Vec<Vec<Dep>>,
}

impl StmtCtx {
    fn new(number: StmtId, vertex: VertexId) -> Self {
        StmtCtx {
            number,
            vertex,
            reads: Vec::new(),
            flushed: 0,
            used: Vec::new(),
            written: Vec::new(),
            guards: Vec::new(),
        }
    }

    fn read(&mut self, var: Var) -> Vec<Dep> {
        if let Some((_, deps)) = self.written.iter().rev().find(|(v, _)| *v == var) {
            return deps.clone();
        }
        let id = self.reads.len() as u32;
        if !self.used.contains(&var) {
            self.used.push(var.clone());
        }
        self.reads.push(Read { id, var });
        vec![Dep::Read(id)]
    }

    fn flush(&mut self) -> Vec<Read> {
        let out = self.reads[self.flushed..].to_vec();
        self.flushed = self.reads.len();
        out
    }
}

fn merge(into: &mut Vec<Dep>, from: Vec<Dep>) {
    for d in from {
        if !into.contains(&d) {
            into.push(d);
        }
    }
}

fn default_value(ty: &Type) -> Value {
    match ty {
        Type::Bool => Value::Bool(false),
        _ => Value::Int(0),
    }
}

struct Interp<'a> {
    unit: &'a SourceUnit,
    aosg: &'a Aosg,
    input: &'a [i64],
    config: RunConfig,
    sink: &'a mut (dyn EventSink + Send),
    seq: u64,
    steps: u64,
    depth: usize,
    output: Vec<String>,
    statics: HashMap<String, Value>,
    next_object: u32,
    methods: HashMap<&'a str, &'a MethodDecl>,
    advice: HashMap<StmtId, &'a AdviceDecl>,
}

impl<'a> Interp<'a> {
    fn new(
        unit: &'a SourceUnit,
        aosg: &'a Aosg,
        input: &'a [i64],
        config: RunConfig,
        sink: &'a mut (dyn EventSink + Send),
    ) -> Self {
        let mut statics = HashMap::new();
        let mut methods = HashMap::new();
        if let Some(c) = unit.class() {
            for f in &c.static_fields {
                statics.insert(f.name.clone(), default_value(&f.ty));
            }
            for m in &c.methods {
                methods.insert(m.name.as_str(), m);
            }
        }
        let advice = unit.aspects.iter().flat_map(|a| a.advices.iter()).map(|a| (a.number, a)).collect();
        Interp {
            unit,
            aosg,
            input,
            config,
            sink,
            seq: 0,
            steps: 0,
            depth: 0,
            output: Vec::new(),
            statics,
            next_object: 1,
            methods,
            advice,
        }
    }

    fn vertex_of(&self, stmt: StmtId) -> VertexId {
        self.aosg.stmt_vertex(stmt).unwrap_or_else(|| panic!("statement {stmt} has no vertex"))
    }

    fn emit(&mut self, mut e: Event) -> RResult<()> {
        e.seq = self.seq;
        self.seq += 1;
        self.sink.event(&e)?;
        Ok(())
    }

    fn event(&self, kind: EventKind, stmt: StmtId) -> Event {
        Event::new(0, kind, self.vertex_of(stmt), Some(stmt))
    }

    fn run_main(&mut self) -> RResult<()> {
        let main = *self.methods.get("main").ok_or(RunError::NoMain)?;
        for a in &self.unit.aspects {
            let e = self.event(EventKind::AspectInstantiated, a.number);
            self.emit(e)?;
        }
        let formals: Vec<(String, Value)> = main.params.iter().map(|p| (p.name.clone(), Value::Args)).collect();
        self.invoke(main, formals, None)?;
        Ok(())
    }

    /// Runs a method or constructor body between its entry and exit events.
    fn invoke(
        &mut self,
        m: &'a MethodDecl,
        formals: Vec<(String, Value)>,
        call: Option<CallRef>,
    ) -> RResult<Option<Value>> {
        if self.depth >= self.config.max_depth {
            return Err(RunError::DepthExceeded {
                stmt: call.map_or(m.number, |c| c.stmt),
                limit: self.config.max_depth,
            });
        }
        self.depth += 1;
        let mut enter = self.event(EventKind::MethodEntered, m.number);
        enter.call = call;
        enter.defined = formals.iter().map(|(n, v)| (Var::local(n.clone()), *v)).collect();
        self.emit(enter)?;
        let mut frame = Frame { scopes: vec![formals.into_iter().collect()] };
        let flow = self.exec_block(&mut frame, &m.body)?;
        let mut exit = self.event(EventKind::MethodExited, m.number);
        exit.call = call;
        if let Flow::Return(stmt, value) = flow {
            exit.returned_by = Some(stmt);
            exit.value = value;
        }
        let value = exit.value;
        self.emit(exit)?;
        self.depth -= 1;
        Ok(value)
    }

    fn run_advice(&mut self, adv: &'a AdviceDecl, bound: Vec<(String, Value)>, call: CallRef) -> RResult<()> {
        if self.depth >= self.config.max_depth {
            return Err(RunError::DepthExceeded { stmt: call.stmt, limit: self.config.max_depth });
        }
        self.depth += 1;
        let mut enter = self.event(EventKind::AdviceEntered, adv.number);
        enter.call = Some(call);
        enter.defined = bound.iter().map(|(n, v)| (Var::local(n.clone()), *v)).collect();
        self.emit(enter)?;
        let mut frame = Frame { scopes: vec![bound.into_iter().collect()] };
        self.exec_block(&mut frame, &adv.body)?;
        let mut exit = self.event(EventKind::AdviceExited, adv.number);
        exit.call = Some(call);
        self.emit(exit)?;
        self.depth -= 1;
        Ok(())
    }

    fn exec_block(&mut self, frame: &mut Frame, block: &'a Block) -> RResult<Flow> {
        frame.scopes.push(HashMap::new());
        let mut flow = Flow::Normal;
        for s in block {
            flow = self.exec_stmt(frame, s)?;
            if matches!(flow, Flow::Return(..)) {
                break;
            }
        }
        frame.scopes.pop();
        Ok(flow)
    }

    fn finish(&mut self, mut ctx: StmtCtx, deps: Vec<Dep>, defined: Vec<(Var, Value)>) -> RResult<()> {
        self.steps += 1;
        if self.steps > self.config.step_budget {
            return Err(RunError::StepBudgetExceeded { budget: self.config.step_budget });
        }
        let mut e = Event::new(0, EventKind::StatementExecuted, ctx.vertex, Some(ctx.number));
        e.reads = ctx.flush();
        e.used = std::mem::take(&mut ctx.used);
        e.deps = deps;
        e.defined = defined;
        self.emit(e)
    }

    fn store(&mut self, frame: &mut Frame, target: &VarRef, v: Value) {
        match target.scope {
            Scope::Static => {
                self.statics.insert(target.name.clone(), v);
            }
            Scope::Local => frame.set(&target.name, v),
        }
    }

    fn exec_stmt(&mut self, frame: &mut Frame, s: &'a Stmt) -> RResult<Flow> {
        let mut ctx = StmtCtx::new(s.number, self.vertex_of(s.number));
        match &s.kind {
            StmtKind::VarDecl { ty, name, init } => {
                let (v, deps) = match init {
                    Some(e) => self.eval(frame, &mut ctx, e)?,
                    None => (default_value(ty), Vec::new()),
                };
                frame.declare(name, v);
                self.finish(ctx, deps, vec![(Var::local(name.clone()), v)])?;
            }
            StmtKind::Assign { target, value } => {
                let (v, deps) = self.eval(frame, &mut ctx, value)?;
                self.store(frame, target, v);
                self.finish(ctx, deps, vec![(target.var(), v)])?;
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let (c, deps) = self.eval(frame, &mut ctx, cond)?;
                self.finish(ctx, deps, Vec::new())?;
                if c.as_bool() {
                    return self.exec_block(frame, then_branch);
                } else if let Some(e) = else_branch {
                    return self.exec_block(frame, e);
                }
            }
            StmtKind::While { cond, body } => loop {
                let (c, deps) = self.eval(frame, &mut ctx, cond)?;
                self.finish(ctx, deps, Vec::new())?;
                if !c.as_bool() {
                    break;
                }
                if let flow @ Flow::Return(..) = self.exec_block(frame, body)? {
                    return Ok(flow);
                }
                ctx = StmtCtx::new(s.number, self.vertex_of(s.number));
            },
            StmtKind::For { init, cond, step, body } => {
                frame.scopes.push(HashMap::new());
                let mut deps = Vec::new();
                let mut defined = Vec::new();
                if let Some(i) = init {
                    let (v, d) = self.eval(frame, &mut ctx, &i.value)?;
                    if i.decl.is_some() {
                        frame.declare(&i.target.name, v);
                    } else {
                        self.store(frame, &i.target, v);
                    }
                    ctx.written.push((i.target.var(), d.clone()));
                    merge(&mut deps, d);
                    defined.push((i.target.var(), v));
                }
                let result = loop {
                    let (c, d) = self.eval(frame, &mut ctx, cond)?;
                    merge(&mut deps, d);
                    self.finish(ctx, deps, defined)?;
                    if !c.as_bool() {
                        break Flow::Normal;
                    }
                    if let flow @ Flow::Return(..) = self.exec_block(frame, body)? {
                        break flow;
                    }
                    ctx = StmtCtx::new(s.number, self.vertex_of(s.number));
                    deps = Vec::new();
                    defined = Vec::new();
                    if let Some(st) = step {
                        let (v, d) = self.eval(frame, &mut ctx, &st.value)?;
                        self.store(frame, &st.target, v);
                        ctx.written.push((st.target.var(), d.clone()));
                        merge(&mut deps, d);
                        defined.push((st.target.var(), v));
                    }
                };
                frame.scopes.pop();
                return Ok(result);
            }
            StmtKind::Return(e) => {
                let (v, deps) = match e {
                    Some(e) => {
                        let (v, d) = self.eval(frame, &mut ctx, e)?;
                        (Some(v), d)
                    }
                    None => (None, Vec::new()),
                };
                self.finish(ctx, deps, Vec::new())?;
                return Ok(Flow::Return(s.number, v));
            }
            StmtKind::Print(parts) => {
                let mut line = String::new();
                let mut deps = Vec::new();
                for p in parts {
                    match p {
                        PrintPart::Text(t) => line.push_str(t),
                        PrintPart::Value(e) => {
                            let (v, d) = self.eval(frame, &mut ctx, e)?;
                            line.push_str(&v.to_string());
                            merge(&mut deps, d);
                        }
                    }
                }
                self.finish(ctx, deps, Vec::new())?;
                self.output.push(line);
            }
            StmtKind::Expr(e) => {
                let (_, deps) = self.eval(frame, &mut ctx, e)?;
                self.finish(ctx, deps, Vec::new())?;
            }
        }
        Ok(Flow::Normal)
    }

    fn eval(&mut self, frame: &mut Frame, ctx: &mut StmtCtx, e: &'a Expr) -> RResult<(Value, Vec<Dep>)> {
        Ok(match e {
            Expr::Int(i) => (Value::Int(*i), Vec::new()),
            Expr::Bool(b) => (Value::Bool(*b), Vec::new()),
            Expr::Var(r) => {
                let v = match r.scope {
                    Scope::Static => *self.statics.get(&r.name).expect("declared static"),
                    Scope::Local => frame.get(&r.name).expect("declared local"),
                };
                (v, ctx.read(r.var()))
            }
            Expr::ArgRead(k) => {
                let deps = ctx.read(Var::local("args"));
                let v =
                    *self.input.get(*k as usize).ok_or(RunError::MissingArgument { stmt: ctx.number, index: *k })?;
                (Value::Int(v), deps)
            }
            Expr::Unary(op, inner) => {
                let (v, d) = self.eval(frame, ctx, inner)?;
                let v = match op {
                    UnaryOp::Neg => Value::Int(v.as_int().wrapping_neg()),
                    UnaryOp::Not => Value::Bool(!v.as_bool()),
                };
                (v, d)
            }
            Expr::Binary(op @ (BinaryOp::And | BinaryOp::Or), l, r) => {
                let (lv, mut deps) = self.eval(frame, ctx, l)?;
                let short = match op {
                    BinaryOp::And => !lv.as_bool(),
                    _ => lv.as_bool(),
                };
                if short {
                    (lv, deps)
                } else {
                    ctx.guards.push(deps.clone());
                    let evaluated = self.eval(frame, ctx, r);
                    ctx.guards.pop();
                    let (rv, rd) = evaluated?;
                    merge(&mut deps, rd);
                    (rv, deps)
                }
            }
            Expr::Binary(op, l, r) => {
                let (lv, mut deps) = self.eval(frame, ctx, l)?;
                let (rv, rd) = self.eval(frame, ctx, r)?;
                merge(&mut deps, rd);
                (self.binary(*op, lv, rv, ctx.number)?, deps)
            }
            Expr::Call(c) => {
                let v = self.call(frame, ctx, c.index, &c.method, &c.args, false)?;
                (v, vec![Dep::Call(c.index)])
            }
            Expr::New(n) => {
                let v = self.call(frame, ctx, n.index, &n.class, &n.args, true)?;
                (v, vec![Dep::Call(n.index)])
            }
        })
    }

    fn binary(&self, op: BinaryOp, l: Value, r: Value, stmt: StmtId) -> RResult<Value> {
        use BinaryOp::*;
        Ok(match op {
            Eq => Value::Bool(l == r),
            Ne => Value::Bool(l != r),
            _ => {
                let (a, b) = (l.as_int(), r.as_int());
                match op {
                    Add => Value::Int(a.wrapping_add(b)),
                    Sub => Value::Int(a.wrapping_sub(b)),
                    Mul => Value::Int(a.wrapping_mul(b)),
                    Div | Rem if b == 0 => return Err(RunError::DivisionByZero { stmt }),
                    Div => Value::Int(a.wrapping_div(b)),
                    Rem => Value::Int(a.wrapping_rem(b)),
                    Lt => Value::Bool(a < b),
                    Le => Value::Bool(a <= b),
                    Gt => Value::Bool(a > b),
                    Ge => Value::Bool(a >= b),
                    Eq | Ne | And | Or => unreachable!(),
                }
            }
        })
    }

    fn call(
        &mut self,
        frame: &mut Frame,
        ctx: &mut StmtCtx,
        index: u32,
        name: &str,
        args: &'a [Expr],
        is_new: bool,
    ) -> RResult<Value> {
        let mut values = Vec::with_capacity(args.len());
        let mut arg_deps = Vec::with_capacity(args.len());
        for a in args {
            let (v, d) = self.eval(frame, ctx, a)?;
            values.push(v);
            arg_deps.push(d);
        }
        let call = CallRef { stmt: ctx.number, index };
        let site = self.aosg.call_site(call.stmt, index).unwrap_or_else(|| panic!("no call site {call:?}"));
        let mut begin = Event::new(0, EventKind::CallBegin, ctx.vertex, Some(ctx.number));
        begin.call = Some(call);
        begin.reads = ctx.flush();
        begin.args = arg_deps;
        for g in &ctx.guards {
            merge(&mut begin.deps, g.clone());
        }
        self.emit(begin)?;

        let value = if is_new {
            let ctor = self.unit.class().and_then(|c| c.constructor.as_ref());
            if let Some(ctor) = ctor {
                let formals = ctor.params.iter().map(|p| p.name.clone()).zip(values).collect();
                self.invoke(ctor, formals, Some(call))?;
            }
            let id = self.next_object;
            self.next_object += 1;
            let mut created = Event::new(0, EventKind::ObjectCreated, ctx.vertex, Some(ctx.number));
            created.call = Some(call);
            created.value = Some(Value::Object(id));
            self.emit(created)?;
            Value::Object(id)
        } else {
            let m = *self.methods.get(name).unwrap_or_else(|| panic!("undeclared method {name}"));
            let jp = site.join_point.map(|i| self.aosg.join_points()[i].clone());
            let mut bound_pc: Vec<(String, Value)> = Vec::new();
            let mut after = None;
            if let Some(jp) = &jp {
                let (_, pc) = self.unit.pointcut(jp.pointcut_stmt).expect("matched pointcut");
                let mut pc_values = vec![Value::Int(0); pc.params.len()];
                for &(apos, ppos) in &jp.bindings {
                    pc_values[ppos as usize] = values[apos as usize];
                }
                bound_pc = pc.params.iter().map(|p| p.name.clone()).zip(pc_values).collect();
                let mut e = self.event(EventKind::JoinPointMatched, jp.pointcut_stmt);
                e.call = Some(call);
                self.emit(e)?;
                if let Some(b) = jp.before {
                    let adv = self.advice[&self.aosg.vertex(b).stmt.expect("advice number")];
                    let bound = bind_advice(adv, &bound_pc);
                    self.run_advice(adv, bound, call)?;
                }
                after = jp.after.map(|a| self.advice[&self.aosg.vertex(a).stmt.expect("advice number")]);
            }
            let formals = m.params.iter().map(|p| p.name.clone()).zip(values).collect();
            let result = self.invoke(m, formals, Some(call))?;
            if let Some(adv) = after {
                let mut bound = bind_advice(adv, &bound_pc);
                if let (Some(r), Some(v)) = (&adv.result, result) {
                    bound.push((r.name.clone(), v));
                }
                self.run_advice(adv, bound, call)?;
            }
            result.unwrap_or(Value::Int(0))
        };

        let mut end = Event::new(0, EventKind::CallEnd, site.actual_out, Some(ctx.number));
        end.call = Some(call);
        end.value = Some(value);
        self.emit(end)?;
        Ok(value)
    }
}

/// Values of an advice's parameters, taken from the pointcut parameters it names.
fn bind_advice(adv: &AdviceDecl, pointcut: &[(String, Value)]) -> Vec<(String, Value)> {
    adv.params
        .iter()
        .map(|p| {
            let i = adv.pointcut_args.iter().position(|a| *a == p.name).expect("checked binding");
            (p.name.clone(), pointcut[i].1)
        })
        .collect()
}

#[cfg(test)]
mod tests;
