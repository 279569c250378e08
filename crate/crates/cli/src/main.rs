//! Batch front end: reads a JSON problem file, runs the corresponding
//! pipeline, prints a canonical JSON (or aligned-table) report.
//!
//! Exit codes: 0 = verified/answered, 1 = hypothesis failure or
//! inconclusive, 2 = input error.

mod output;
mod problem;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use frechet_core::diffcalc::{DiffChain, GridWindow};
use frechet_core::group::{generates, generation_divisors, subgroup_index, SubgroupIndex};
use frechet_core::montel::{counterexample, reduction_trace, verify_montel, VerifyOptions};
use frechet_core::solver::{polynomial_ansatz_solve, window_kernel, Equation};
use frechet_core::CoreError;

use output::{annotate_floats, render_pretty, to_canonical_json};
use problem::{ProblemFile, Query};

#[derive(Parser)]
#[command(name = "frechet", version, about = "Exact mixed-differences toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonFlags {
    /// Problem file (JSON)
    input: String,
    /// Aligned human tables instead of JSON
    #[arg(long)]
    pretty: bool,
    /// Add decimal approximations (for reading only; exact values stay)
    #[arg(long)]
    float: bool,
    /// Parallel fit workers (reserved; execution is sequential)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyFlags {
    #[command(flatten)]
    common: CommonFlags,
    /// Per-axis initial window sizes, comma separated (e.g. "40" or "8,8")
    #[arg(long, default_value = "20")]
    window: String,
    /// Certificate fitting degree cap
    #[arg(long, default_value_t = 8)]
    degree_cap: u32,
    /// Abort the condition check above this many index tuples
    #[arg(long, default_value_t = 1_000_000)]
    max_tuples: u128,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the steps generate the group
    Generates(CommonFlags),
    /// Apply a difference chain to an exponential polynomial
    Apply(CommonFlags),
    /// Solve a difference system (window kernel or polynomial ansatz)
    Solve(CommonFlags),
    /// Run the full generating-condition + certification pipeline
    VerifyMontel(VerifyFlags),
    /// Build a periodic counterexample from a non-generating step set
    Counterexample(CommonFlags),
    /// Materialize and check the proof's reduction trace
    Trace(CommonFlags),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (flags, result) = match &cli.command {
        Command::Generates(f) => (f, run(f, "generates-query", cmd_generates)),
        Command::Apply(f) => (f, run(f, "apply-query", cmd_apply)),
        Command::Solve(f) => (f, run(f, "solve-query", cmd_solve)),
        Command::VerifyMontel(vf) => (&vf.common, run_verify(vf)),
        Command::Counterexample(f) => (f, run(f, "counterexample-query", cmd_counterexample)),
        Command::Trace(f) => (f, run(f, "trace-query", cmd_trace)),
    };
    let (mut value, code) = match result {
        Ok((v, code)) => (v, code),
        Err(e) => (json!({ "error": e.message }), e.code),
    };
    if flags.float {
        annotate_floats(&mut value);
    }
    if flags.pretty {
        print!("{}", render_pretty(&value));
    } else {
        println!("{}", to_canonical_json(&value));
    }
    ExitCode::from(code)
}

struct CmdError {
    message: String,
    code: u8,
}

impl CmdError {
    fn input(msg: impl Into<String>) -> Self {
        CmdError {
            message: msg.into(),
            code: 2,
        }
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::HypothesisViolation(_)
            | CoreError::GeneratingSet
            | CoreError::InfiniteIndex => 1,
            _ => 2,
        };
        CmdError {
            message: e.to_string(),
            code,
        }
    }
}

type CmdResult = Result<(Value, u8), CmdError>;

fn load(path: &str) -> Result<ProblemFile, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::input(format!("cannot read {path}: {e}")))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| CmdError::input(format!("schema error in {path}: {e}")))?;
    if file.version != 1 {
        return Err(CmdError::input(format!(
            "unsupported problem-file version {}",
            file.version
        )));
    }
    Ok(file)
}

fn run(flags: &CommonFlags, expected: &str, f: impl FnOnce(Query) -> CmdResult) -> CmdResult {
    let file = load(&flags.input)?;
    if file.query.kind() != expected {
        return Err(CmdError::input(format!(
            "expected a {expected} payload, found {}",
            file.query.kind()
        )));
    }
    f(file.query)
}

fn cmd_generates(q: Query) -> CmdResult {
    let Query::GeneratesQuery(q) = q else { unreachable!() };
    let gen = generates(&q.group, &q.steps)?;
    let index = match subgroup_index(&q.group, &q.steps)? {
        SubgroupIndex::Finite(n) => Value::String(n.to_string()),
        SubgroupIndex::Infinite => Value::String("infinite".into()),
    };
    let divisors: Vec<String> = generation_divisors(&q.group, &q.steps)?
        .iter()
        .map(|d| d.to_string())
        .collect();
    Ok((
        json!({
            "generates": gen,
            "index": index,
            "snf_divisors": divisors,
        }),
        0,
    ))
}

fn cmd_apply(q: Query) -> CmdResult {
    let Query::ApplyQuery(q) = q else { unreachable!() };
    let chain = DiffChain::new(q.chain)?;
    let result = chain.apply_exppoly(&q.f)?;
    Ok((
        json!({
            "display": result.to_string(),
            "result": serde_json::to_value(&result).unwrap(),
        }),
        0,
    ))
}

fn cmd_solve(q: Query) -> CmdResult {
    let Query::SolveQuery(q) = q else { unreachable!() };
    match (&q.window, q.max_degree) {
        (Some(window), _) => {
            let equations: Vec<Equation> = q
                .equations
                .iter()
                .map(|e| Ok((DiffChain::new(e.chain.clone())?, e.rhs.clone())))
                .collect::<Result<_, CoreError>>()?;
            let sol = window_kernel(&equations, window)?;
            let code = if sol.is_consistent() { 0 } else { 1 };
            Ok((serde_json::to_value(&sol).unwrap(), code))
        }
        (None, Some(max_degree)) => {
            let equations: Vec<_> = q
                .equations
                .iter()
                .map(|e| {
                    Ok((
                        DiffChain::new(e.chain.clone())?,
                        e.rhs.clone().unwrap_or_else(|| {
                            frechet_core::exppoly::ExpPoly::zero(q.num_vars)
                        }),
                    ))
                })
                .collect::<Result<_, CoreError>>()?;
            let sol = polynomial_ansatz_solve(&equations, max_degree, q.num_vars)?;
            let code = if sol.space.is_consistent() { 0 } else { 1 };
            Ok((
                json!({
                    "basis_exponents": sol.basis_exponents,
                    "solution": serde_json::to_value(&sol.space).unwrap(),
                }),
                code,
            ))
        }
        (None, None) => Err(CmdError::input(
            "solve-query needs either a window (grid mode) or max_degree (ansatz mode)",
        )),
    }
}

fn run_verify(flags: &VerifyFlags) -> CmdResult {
    let file = load(&flags.common.input)?;
    let Query::MontelSystem(sys) = file.query else {
        return Err(CmdError::input(format!(
            "expected a montel-system payload, found {}",
            file.query.kind()
        )));
    };
    let sizes: Vec<i64> = flags
        .window
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CmdError::input(format!("bad --window: {e}")))?;
    let d = sys.group.free_rank;
    let sizes = if sizes.len() == 1 {
        vec![sizes[0]; d]
    } else {
        sizes
    };
    if sizes.len() != d {
        return Err(CmdError::input(format!(
            "--window needs 1 or {d} sizes, got {}",
            sizes.len()
        )));
    }
    let window = GridWindow::new(vec![0; d], sizes)?;
    let opts = VerifyOptions {
        degree_cap: flags.degree_cap,
        max_tuples: flags.max_tuples,
        ..VerifyOptions::default()
    };
    let report = verify_montel(&sys, &window, &opts)?;
    let code = if report.verified() { 0 } else { 1 };
    Ok((serde_json::to_value(&report).unwrap(), code))
}

fn cmd_counterexample(q: Query) -> CmdResult {
    let Query::CounterexampleQuery(q) = q else { unreachable!() };
    let ce = counterexample(&q.group, &q.steps, q.window)?;
    Ok((serde_json::to_value(&ce).unwrap(), 0))
}

fn cmd_trace(q: Query) -> CmdResult {
    let Query::TraceQuery(q) = q else { unreachable!() };
    let trace = reduction_trace(&q.system, &q.f, &q.tuple)?;
    let code = if trace.all_ok { 0 } else { 1 };
    Ok((serde_json::to_value(&trace).unwrap(), code))
}
