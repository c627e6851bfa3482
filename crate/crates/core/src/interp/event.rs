use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::aosg::VertexId;
use crate::lang::{StmtId, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    /// Arithmetic wraps on overflow.
    Int(i64),
    Bool(bool),
    Object(u32),
    /// The command-line argument array bound to `main`.
    Args,
}

impl Value {
    pub fn as_int(self) -> i64 {
        match self {
            Value::Int(i) => i,
            other => panic!("expected an int, found {other:?}"),
        }
    }

    pub fn as_bool(self) -> bool {
        match self {
            Value::Bool(b) => b,
            other => panic!("expected a boolean, found {other:?}"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Object(id) => write!(f, "object#{id}"),
            Value::Args => f.write_str("args"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    AspectInstantiated,
    StatementExecuted,
    CallBegin,
    JoinPointMatched,
    AdviceEntered,
    AdviceExited,
    MethodEntered,
    MethodExited,
    ObjectCreated,
    CallEnd,
}

/// A call or `new` expression: statement number and call index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CallRef {
    pub stmt: StmtId,
    pub index: u32,
}

/// One variable read by the statement being evaluated, numbered in evaluation
/// order within that statement execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Read {
    pub id: u32,
    pub var: Var,
}

/// Something a value was computed from: an earlier read of the same statement
/// execution, or the result of one of its calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dep {
    Read(u32),
    Call(u32),
}

/// One step of execution.
///
/// Reads are reported at the first event after they happen: a `CallBegin` of the
/// statement being evaluated, or its `StatementExecuted`. A consumer resolving
/// reads against the most recent definitions at that moment sees the same
/// definitions the interpreter read from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub vertex: VertexId,
    pub stmt: Option<StmtId>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub defined: Vec<(Var, Value)>,
    /// Every variable the statement read, in first-read order (`StatementExecuted` only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub used: Vec<Var>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reads: Vec<Read>,
    /// `StatementExecuted`: what the statement's own expressions depend on.
    /// `CallBegin`: the operands of enclosing `&&`/`||` that let the call happen.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deps: Vec<Dep>,
    /// `CallBegin`: dependences of each argument.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<Vec<Dep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub call: Option<CallRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    /// `MethodExited`: the `return` that ended the activation, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub returned_by: Option<StmtId>,
}

impl Event {
    pub(crate) fn new(seq: u64, kind: EventKind, vertex: VertexId, stmt: Option<StmtId>) -> Event {
        Event {
            seq,
            kind,
            vertex,
            stmt,
            defined: Vec::new(),
            used: Vec::new(),
            reads: Vec::new(),
            deps: Vec::new(),
            args: Vec::new(),
            call: None,
            value: None,
            returned_by: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct SinkError(pub String);

/// Consumer of the event stream. Returning an error stops the run.
pub trait EventSink {
    fn event(&mut self, event: &Event) -> Result<(), SinkError>;
}

impl EventSink for Vec<Event> {
    fn event(&mut self, event: &Event) -> Result<(), SinkError> {
        self.push(event.clone());
        Ok(())
    }
}

impl<S: EventSink + ?Sized> EventSink for &mut S {
    fn event(&mut self, event: &Event) -> Result<(), SinkError> {
        (**self).event(event)
    }
}

impl<A: EventSink, B: EventSink> EventSink for (A, B) {
    fn event(&mut self, event: &Event) -> Result<(), SinkError> {
        self.0.event(event)?;
        self.1.event(event)
    }
}

/// Discards every event.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl EventSink for NullSink {
    fn event(&mut self, _: &Event) -> Result<(), SinkError> {
        Ok(())
    }
}

/// Writes one JSON object per event, newline-delimited.
#[derive(Debug)]
pub struct NdjsonSink<W: Write> {
    out: W,
}

impl<W: Write> NdjsonSink<W> {
    pub fn new(out: W) -> Self {
        NdjsonSink { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> EventSink for NdjsonSink<W> {
    fn event(&mut self, event: &Event) -> Result<(), SinkError> {
        serde_json::to_writer(&mut self.out, event).map_err(|e| SinkError(e.to_string()))?;
        self.out.write_all(b"\n").map_err(|e| SinkError(e.to_string()))
    }
}
