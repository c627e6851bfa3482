use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aoslice::interp::{NdjsonSink, NullSink, RunConfig, RunError};
use aoslice::lang::StmtTable;
use aoslice::pipeline::{slice_report, LoadError, Session, SlicedRun};
use aoslice::slicer::Criterion;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Dynamic slicer for MiniAJ programs.
#[derive(Debug, Parser)]
#[command(name = "aoslice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the source with the number of every statement and header.
    Parse {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Export the dependence graph; with --args, marks reflect that run.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Execute the program and print its output.
    Run {
        file: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        /// Write the event stream as NDJSON to this file (`-` for stdout, after the output).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Execute the program and print the slice of each criterion.
    Slice {
        file: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        /// Statement number of a criterion; pair each with --var.
        #[arg(long = "at", value_name = "STMT", required = true)]
        at: Vec<u32>,
        /// Variable of a criterion.
        #[arg(long = "var", value_name = "NAME", required = true)]
        var: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include the final dynamic mark of every edge.
        #[arg(long)]
        dump_marks: bool,
    },
}

#[derive(Debug, Args)]
struct ExecArgs {
    /// Integer command-line arguments of the MiniAJ program.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "INT")]
    args: Option<Vec<i64>>,
    /// Maximum number of executed statements.
    #[arg(long, env = "AOSLICE_STEP_BUDGET", default_value_t = RunConfig::default().step_budget)]
    step_budget: u64,
}

impl ExecArgs {
    fn config(&self) -> RunConfig {
        RunConfig { step_budget: self.step_budget, ..RunConfig::default() }
    }

    fn input(&self) -> &[i64] {
        self.args.as_deref().unwrap_or(&[])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Program(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}

/// Turns a failed run into a diagnostic; slicer failures are internal.
fn check_run(run: &SlicedRun<'_>) -> Result<(), CliError> {
    match &run.execution.error {
        None => Ok(()),
        Some(RunError::Sink(e)) => Err(CliError::Internal(e.to_string())),
        Some(e) => Err(CliError::Program(format!("program stopped: {e}"))),
    }
}

fn parse_cmd(file: &Path, format: Format, out: &mut impl Write) -> Result<(), CliError> {
    let session = Session::load(file)?;
    let table = StmtTable::new(&session.unit);
    match format {
        Format::Json => {
            let v = json!({ "path": session.unit.path, "statements": table.entries() });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Text => {
            for (i, line) in session.unit.text.lines().enumerate() {
                let numbers: Vec<String> = table.on_line(i as u32 + 1).iter().map(u32::to_string).collect();
                writeln!(out, "{:>6} | {line}", numbers.join(","))?;
            }
        }
        Format::Dot => return Err(CliError::Usage("parse supports --format text or json".into())),
    }
    Ok(())
}

fn graph_cmd(file: &Path, format: Format, exec: &ExecArgs, out: &mut impl Write) -> Result<(), CliError> {
    let session = Session::load(file)?;
    let marks = match &exec.args {
        Some(_) => {
            let run = session.run_sliced(exec.input(), exec.config());
            check_run(&run)?;
            Some(run.slicer.marks().to_vec())
        }
        None => None,
    };
    match format {
        Format::Dot => write!(out, "{}", session.graph.to_dot(marks.as_deref()))?,
        Format::Json => {
            let mut v = session.graph.to_json();
            if let Some(m) = marks {
                v["marks"] = json!(m);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Text => return Err(CliError::Usage("graph supports --format dot or json".into())),
    }
    Ok(())
}

fn run_cmd(file: &Path, exec: &ExecArgs, trace: Option<&PathBuf>, out: &mut impl Write) -> Result<(), CliError> {
    let session = Session::load(file)?;
    let to_stdout = trace.is_some_and(|p| p.as_os_str() == "-");
    let mut buffered = NdjsonSink::new(Vec::new());
    let run = match trace {
        Some(path) if !to_stdout => {
            let mut sink = NdjsonSink::new(BufWriter::new(File::create(path)?));
            let run = session.run_with(exec.input(), exec.config(), &mut sink);
            sink.into_inner().flush()?;
            run
        }
        Some(_) => session.run_with(exec.input(), exec.config(), &mut buffered),
        None => session.run_with(exec.input(), exec.config(), &mut NullSink),
    };
    for line in &run.execution.output {
        writeln!(out, "{line}")?;
    }
    if to_stdout {
        out.write_all(&buffered.into_inner())?;
    }
    check_run(&run)
}

struct SliceRequest<'a> {
    at: &'a [u32],
    var: &'a [String],
    format: Format,
    dump_marks: bool,
}

fn slice_cmd(file: &Path, exec: &ExecArgs, req: SliceRequest<'_>, out: &mut impl Write) -> Result<(), CliError> {
    if req.at.len() != req.var.len() {
        return Err(CliError::Usage(format!("{} --at values but {} --var values", req.at.len(), req.var.len())));
    }
    let criteria: Vec<Criterion> = req.at.iter().zip(req.var).map(|(&s, v)| Criterion::new(s, v.clone())).collect();
    let session = Session::load(file)?;
    let run = session.run_sliced(exec.input(), exec.config());
    check_run(&run)?;
    let slices = run.slices(&criteria).map_err(|e| CliError::Program(e.to_string()))?;
    let executed = run.slicer.executed();
    match req.format {
        Format::Json => {
            let mut v = slice_report(&slices, exec.input(), &executed);
            if req.dump_marks {
                v["marks"] = json!(run.slicer.marks());
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Text => {
            let show = |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
            for s in &slices {
                writeln!(out, "<{}, {}>: {}", s.criterion.stmt, s.criterion.var, show(&s.stmts))?;
            }
            if slices.len() > 1 {
                let mut union: Vec<u32> = slices.iter().flat_map(|s| s.stmts.iter().copied()).collect();
                union.sort_unstable();
                union.dedup();
                writeln!(out, "union: {}", show(&union))?;
            }
            if req.dump_marks {
                let marks: String = run.slicer.marks().iter().map(|&m| if m { '1' } else { '0' }).collect();
                writeln!(out, "marks: {marks}")?;
            }
        }
        Format::Dot => return Err(CliError::Usage("slice supports --format text or json".into())),
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Parse { file, format } => parse_cmd(file, *format, out),
        Command::Graph { file, format, exec } => graph_cmd(file, *format, exec, out),
        Command::Run { file, exec, trace } => run_cmd(file, exec, trace.as_ref(), out),
        Command::Slice { file, exec, at, var, format, dump_marks } => {
            slice_cmd(file, exec, SliceRequest { at, var, format: *format, dump_marks: *dump_marks }, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = dispatch(&cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(CliError::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aoslice: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
