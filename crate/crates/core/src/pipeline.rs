//! Parse, analyze, build the graph, then run with the slicer attached.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::json;

use crate::aosg::Aosg;
use crate::interp::{run, Event, EventSink, Execution, RunConfig};
use crate::lang::{parse_source, FrontendError, SourceUnit, StmtId};
use crate::model::{ModelError, ProgramModel};
use crate::slicer::{Criterion, LookupError, Slice, Slicer};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Frontend { path: String, source: FrontendError },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
}

/// A checked program with its static analyses and frozen graph.
#[derive(Debug, Clone)]
pub struct Session {
    pub unit: SourceUnit,
    pub model: ProgramModel,
    pub graph: Aosg,
}

/// Result of one execution with the slicer attached.
#[derive(Debug)]
pub struct SlicedRun<'s> {
    pub execution: Execution,
    pub slicer: Slicer<'s>,
}

impl Session {
    pub fn from_source(path: &str, text: &str) -> Result<Session, LoadError> {
        let unit = parse_source(path, text).map_err(|source| LoadError::Frontend { path: path.to_string(), source })?;
        let model = ProgramModel::build(&unit).map_err(|source| LoadError::Model { path: path.to_string(), source })?;
        let graph = Aosg::build(&unit, &model);
        Ok(Session { unit, model, graph })
    }

    pub fn load(path: &Path) -> Result<Session, LoadError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
        Session::from_source(&shown, &text)
    }

    /// Runs the program, feeding every event to the slicer and then to `also`.
    pub fn run_with(&self, input: &[i64], config: RunConfig, also: &mut (dyn EventSink + Send)) -> SlicedRun<'_> {
        let mut slicer = Slicer::new(&self.graph, &self.model);
        let execution = run(&self.unit, &self.graph, input, config, &mut (&mut slicer, also));
        SlicedRun { execution, slicer }
    }

    pub fn run_sliced(&self, input: &[i64], config: RunConfig) -> SlicedRun<'_> {
        self.run_with(input, config, &mut crate::interp::NullSink)
    }

    /// Like [`Session::run_sliced`], also returning the event stream.
    pub fn run_recorded(&self, input: &[i64], config: RunConfig) -> (SlicedRun<'_>, Vec<Event>) {
        let mut events = Vec::new();
        let run = self.run_with(input, config, &mut events);
        (run, events)
    }
}

impl SlicedRun<'_> {
    /// Looks up every criterion; fails on the first one that cannot be answered.
    pub fn slices(&self, criteria: &[Criterion]) -> Result<Vec<Slice>, LookupError> {
        criteria.iter().map(|c| self.slicer.lookup(c)).collect()
    }
}

/// JSON report of one or more slices of a run.
///
/// A single criterion gives `{criterion, slice, input, executedStmts}`. Several
/// give their union under `slice` and each one under `criteria`.
pub fn slice_report(slices: &[Slice], input: &[i64], executed: &[StmtId]) -> serde_json::Value {
    let union: BTreeSet<StmtId> = slices.iter().flat_map(|s| s.stmts.iter().copied()).collect();
    match slices {
        [one] => json!({
            "criterion": one.criterion,
            "slice": one.stmts,
            "input": input,
            "executedStmts": executed,
        }),
        many => json!({
            "criteria": many.iter().map(|s| json!({ "criterion": s.criterion, "slice": s.stmts })).collect::<Vec<_>>(),
            "slice": union,
            "input": input,
            "executedStmts": executed,
        }),
    }
}
