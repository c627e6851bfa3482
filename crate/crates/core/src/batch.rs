//! Differential checking of the slicer against the trace oracle over many programs.
//!
//! Programs are independent, so a sweep maps them in parallel when the
//! `parallel` feature is enabled and falls back to a plain loop otherwise.

use std::collections::BTreeSet;

use crate::interp::{RunConfig, RunError};
use crate::lang::StmtId;
use crate::oracle::{OracleError, Trace};
use crate::pipeline::{LoadError, Session};
use crate::slicer::{Criterion, LookupError};
use crate::synth::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

/// One criterion where the two slicers disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub criterion: Criterion,
    pub marking: Result<Vec<StmtId>, LookupError>,
    pub oracle: Result<Vec<StmtId>, OracleError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramReport {
    pub stmts: StmtId,
    pub criteria: usize,
    pub run_error: Option<RunError>,
    /// Static marks equal the initial dynamic marks.
    pub initial_marks_ok: bool,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Runs one program, then compares both slicers on every executed statement
/// and every variable it uses or defines.
pub fn check_program(program: &Program, config: RunConfig) -> Result<ProgramReport, CheckError> {
    let session = Session::from_source("generated.maj", &program.source)?;
    let fresh = crate::slicer::Slicer::new(&session.graph, &session.model);
    let initial_marks_ok = fresh.marks() == session.graph.static_marks().as_slice();

    let (run, events) = session.run_recorded(&program.input, config);
    let trace = Trace::build(&session.model, &events)?;
    let executed = run.slicer.executed();
    let traced: Vec<StmtId> = trace.executed().into_iter().collect();
    let mut mismatches = Vec::new();
    let mut criteria = 0;
    if executed != traced {
        mismatches.push(Mismatch {
            criterion: Criterion::new(0, "<executed>"),
            marking: Ok(executed.clone()),
            oracle: Ok(traced),
        });
    }
    for &stmt in &executed {
        let Some(du) = session.model.def_use.get(stmt) else { continue };
        let names: BTreeSet<&str> = du.defs.iter().chain(&du.uses).map(|v| v.name.as_str()).collect();
        for name in names {
            criteria += 1;
            let c = Criterion::new(stmt, name);
            let marking = run.slicer.lookup(&c).map(|s| s.stmts);
            let oracle = trace.slice(&session.model, stmt, name).map(|s| s.into_iter().collect());
            if marking.as_ref().ok() != oracle.as_ref().ok() {
                mismatches.push(Mismatch { criterion: c, marking, oracle });
            }
        }
    }
    Ok(ProgramReport {
        stmts: session.unit.stmt_count,
        criteria,
        run_error: run.execution.error,
        initial_marks_ok,
        mismatches,
    })
}

/// Checks every program, preserving order.
pub fn sweep(programs: &[Program], config: RunConfig, mode: Mode) -> Vec<Result<ProgramReport, CheckError>> {
    match mode {
        Mode::Sequential => programs.iter().map(|p| check_program(p, config)).collect(),
        Mode::Parallel => parallel_sweep(programs, config),
    }
}

#[cfg(feature = "parallel")]
fn parallel_sweep(programs: &[Program], config: RunConfig) -> Vec<Result<ProgramReport, CheckError>> {
    use rayon::prelude::*;
    programs.par_iter().map(|p| check_program(p, config)).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_sweep(programs: &[Program], config: RunConfig) -> Vec<Result<ProgramReport, CheckError>> {
    programs.iter().map(|p| check_program(p, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{random_program, SynthConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn corpus(seed: u64, n: usize) -> Vec<Program> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| random_program(&mut rng, &SynthConfig { with_aspect: i % 2 == 0, ..SynthConfig::default() }))
            .collect()
    }

    #[test]
    fn slicers_agree_on_a_small_corpus() {
        let programs = corpus(1, 60);
        for (p, r) in programs.iter().zip(sweep(&programs, RunConfig::default(), Mode::Parallel)) {
            let r = r.unwrap();
            assert!(r.initial_marks_ok);
            assert!(r.mismatches.is_empty(), "{:#?}\n{}\ninput {:?}", r.mismatches, p.source, p.input);
        }
    }

    #[test]
    fn modes_give_identical_reports() {
        let programs = corpus(2, 16);
        let seq: Vec<_> =
            sweep(&programs, RunConfig::default(), Mode::Sequential).into_iter().map(Result::unwrap).collect();
        let par: Vec<_> =
            sweep(&programs, RunConfig::default(), Mode::Parallel).into_iter().map(Result::unwrap).collect();
        assert_eq!(seq, par);
    }
}
