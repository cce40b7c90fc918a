//! The `murtlola` command line: `check`, `run` and `oracle`.
//!
//! [`run_cli`] returns the exit code and both output streams instead of
//! touching the process, so the binary is a thin wrapper around it.
//!
//! Exit codes: `check` 0 accepted, 1 rejected, 2 unreadable or malformed spec.
//! `run` 0 success, 1 rejected spec, 2 malformed spec or trace, 3 evaluation
//! failure (arithmetic overflow or a broken internal invariant). `oracle` 0 no
//! counterexample, 1 counterexample, 2 malformed input or search space too
//! large.
//!
//! JSON reports (`--json`) have a `status` field and, depending on it:
//!
//! - check: `accepted` with `order`; `rejected` with `error` (`kind`,
//!   `message`, and for entailment failures `accessing`, `accessed`, `access`,
//!   `must`, `can`, `scenario`); `invalid` with `error` (`message`, `line`,
//!   `column`).
//! - oracle: `consistent_on_tested` with `inputs_checked`, `horizon`,
//!   `domain`; `counterexample` with `horizon`, `domain`, `inputs` (name to
//!   array of integers or `null`) and `trace` (CSV text); `error` with
//!   `message`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::ast::{Ident, Spec};
use crate::evaluator::{run, run_unverified, EvalPlan, RunError};
use crate::oracle::{check_consistency, OracleConfig, OracleVerdict, SearchStrategy};
use crate::parser::{parse_spec, ParseError};
use crate::semantics::StreamMap;
use crate::trace::{read_trace, trace_to_string, write_trace};
use crate::typecheck::{describe_scenario, type_spec, Extensions, TypeError};

#[derive(Debug, Parser)]
#[command(name = "murtlola", version, about = "Check, run and test μRTLola specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ExtensionFlags {
    /// Type-check equations strictly in textual order.
    #[arg(long)]
    no_reorder: bool,
    /// Reject `x.prev(..)` inside the equation of `x`.
    #[arg(long)]
    no_prev_self: bool,
}

impl ExtensionFlags {
    fn extensions(&self) -> Extensions {
        Extensions { reorder: !self.no_reorder, prev_self: !self.no_prev_self }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Guided,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Type-check a specification.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        ext: ExtensionFlags,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a specification over a CSV input trace.
    Run {
        spec: PathBuf,
        trace: PathBuf,
        /// Write the output trace here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check the outputs against the specification before writing.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        ext: ExtensionFlags,
    },
    /// Search for an input trace under which the specification has no solution.
    Oracle {
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        /// Comma-separated value domain for input cells.
        #[arg(long, default_value = "0,1", value_delimiter = ',', allow_negative_numbers = true)]
        domain: Vec<i64>,
        /// Test this many random input traces; 0 tests all of them.
        #[arg(long, default_value_t = 0)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest input space enumerated without sampling.
        #[arg(long, default_value_t = crate::oracle::DEFAULT_SPACE_CAP)]
        cap: u128,
        #[arg(long, value_enum, default_value = "guided")]
        strategy: StrategyArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn out(code: i32, stdout: impl Into<String>) -> Self {
        CliOutput { code, stdout: stdout.into(), stderr: String::new() }
    }

    fn err(code: i32, stderr: impl Into<String>) -> Self {
        CliOutput { code, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { CliOutput::err(2, text) } else { CliOutput::out(0, text) };
        }
    };
    match cli.command {
        Command::Check { spec, ext, json } => cmd_check(&spec, ext.extensions(), json),
        Command::Run { spec, trace, out, verify, ext } => {
            cmd_run(&spec, &trace, out.as_deref(), verify, ext.extensions())
        }
        Command::Oracle { spec, horizon, domain, sample, seed, cap, strategy, json } => {
            let strategy = match strategy {
                StrategyArg::Guided => SearchStrategy::Guided,
                StrategyArg::Exhaustive => SearchStrategy::Exhaustive,
            };
            cmd_oracle(&spec, OracleArgs { horizon, domain, sample, seed, cap, strategy }, json)
        }
    }
}

enum LoadError {
    Io(String),
    Parse(String, ParseError),
}

impl LoadError {
    fn message(&self) -> String {
        match self {
            LoadError::Io(m) => m.clone(),
            LoadError::Parse(file, e) => e.render(file),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            LoadError::Io(m) => json!({ "status": "invalid", "error": { "message": m } }),
            LoadError::Parse(_, e) => json!({
                "status": "invalid",
                "error": { "message": e.kind.to_string(), "line": e.pos.line, "column": e.pos.column },
            }),
        }
    }
}

fn load_spec(path: &Path) -> Result<Spec, LoadError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{file}: {e}")))?;
    parse_spec(&text).map_err(|e| LoadError::Parse(file, e))
}

fn json_line(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn type_error_json(e: &TypeError) -> serde_json::Value {
    let mut obj = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        TypeError::EntailmentFailure { accessing, accessed, access, must, can, witness } => {
            let extra = json!({
                "accessing": accessing.as_str(),
                "accessed": accessed.as_str(),
                "access": access,
                "must": must.to_string(),
                "can": can.to_string(),
                "scenario": describe_scenario(witness),
            });
            obj.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
        }
        TypeError::CyclicDependency { cycle } => {
            obj["cycle"] = json!(cycle.iter().map(Ident::as_str).collect::<Vec<_>>());
        }
        _ => {}
    }
    obj
}

fn type_error_text(e: &TypeError) -> String {
    let mut s = format!("rejected: {e}\n");
    if let TypeError::EntailmentFailure { accessing, accessed, access, must, can, witness } = e {
        let _ = writeln!(s, "  access:   {accessing} -> {accessed} ({access})");
        let _ = writeln!(s, "  must:     {must}");
        let _ = writeln!(s, "  can:      {can}");
        let _ = writeln!(s, "  scenario: {}", describe_scenario(witness));
    }
    s
}

fn cmd_check(path: &Path, ext: Extensions, json: bool) -> CliOutput {
    let spec = match load_spec(path) {
        Ok(spec) => spec,
        Err(e) if json => return CliOutput::out(2, json_line(&e.json())),
        Err(e) => return CliOutput::err(2, e.message() + "\n"),
    };
    match type_spec(&spec, ext) {
        Ok(order) => {
            let names: Vec<&str> = order.names(&spec).into_iter().map(Ident::as_str).collect();
            if json {
                CliOutput::out(0, json_line(&json!({ "status": "accepted", "order": names })))
            } else {
                CliOutput::out(0, format!("accepted\norder: {}\n", names.join(", ")))
            }
        }
        Err(e) if json => {
            CliOutput::out(1, json_line(&json!({ "status": "rejected", "error": type_error_json(&e) })))
        }
        Err(e) => CliOutput::out(1, type_error_text(&e)),
    }
}

fn cmd_run(
    spec_path: &Path,
    trace_path: &Path,
    out: Option<&Path>,
    verify: bool,
    ext: Extensions,
) -> CliOutput {
    let spec = match load_spec(spec_path) {
        Ok(spec) => spec,
        Err(e) => return CliOutput::err(2, e.message() + "\n"),
    };
    let plan = match EvalPlan::new(spec, ext) {
        Ok(plan) => plan,
        Err(e) => return CliOutput::err(1, type_error_text(&e)),
    };
    let trace_file = trace_path.display().to_string();
    let text = match std::fs::read_to_string(trace_path) {
        Ok(text) => text,
        Err(e) => return CliOutput::err(2, format!("{trace_file}: {e}\n")),
    };
    let rho_in = match read_trace(&text, &plan.spec().inputs) {
        Ok(map) => map,
        Err(e) => return CliOutput::err(2, format!("{trace_file}: {e}\n")),
    };
    let result = if verify { run(&plan, &rho_in) } else { run_unverified(&plan, &rho_in) };
    let rho_out = match result {
        Ok(out) => out,
        Err(e @ (RunError::MissingInput(_) | RunError::HorizonMismatch { .. })) => {
            return CliOutput::err(2, format!("{trace_file}: {e}\n"))
        }
        Err(e) if e.is_internal() => return CliOutput::err(3, format!("internal error: {e}\n")),
        Err(e) => return CliOutput::err(3, format!("error: {e}\n")),
    };
    let order: Vec<&Ident> = plan.spec().outputs().collect();
    let mut buf = Vec::new();
    write_trace(&rho_out, &order, &mut buf).expect("writing to memory");
    let csv = String::from_utf8(buf).expect("csv output is utf-8");
    match out {
        None => CliOutput::out(0, csv),
        Some(path) => match std::fs::write(path, csv) {
            Ok(()) => CliOutput::default(),
            Err(e) => CliOutput::err(2, format!("{}: {e}\n", path.display())),
        },
    }
}

struct OracleArgs {
    horizon: usize,
    domain: Vec<i64>,
    sample: usize,
    seed: u64,
    cap: u128,
    strategy: SearchStrategy,
}

fn render_domain(cfg: &OracleConfig) -> String {
    let values: Vec<String> = cfg.domain().iter().map(i64::to_string).collect();
    format!("{{{}}}", values.join(","))
}

fn cmd_oracle(path: &Path, args: OracleArgs, json: bool) -> CliOutput {
    let fail = |message: String| {
        if json {
            CliOutput::out(2, json_line(&json!({ "status": "error", "message": message })))
        } else {
            CliOutput::err(2, message + "\n")
        }
    };
    let spec = match load_spec(path) {
        Ok(spec) => spec,
        Err(e) => return fail(e.message()),
    };
    let mut cfg = match OracleConfig::new(args.horizon, args.domain) {
        Ok(cfg) => cfg.with_strategy(args.strategy),
        Err(e) => return fail(e.to_string()),
    };
    cfg.space_cap = args.cap;
    if args.sample > 0 {
        cfg = cfg.sampled(args.sample, args.seed);
    }
    let verdict = match check_consistency(&spec, &cfg) {
        Ok(v) => v,
        Err(e) => return fail(e.to_string()),
    };
    let domain: Vec<i64> = cfg.domain().iter().copied().collect();
    match verdict {
        OracleVerdict::ConsistentOnTested { inputs_checked } => {
            if json {
                CliOutput::out(
                    0,
                    json_line(&json!({
                        "status": "consistent_on_tested",
                        "inputs_checked": inputs_checked,
                        "horizon": cfg.horizon(),
                        "domain": domain,
                    })),
                )
            } else {
                CliOutput::out(
                    0,
                    format!(
                        "no counterexample among {inputs_checked} input traces (horizon {}, domain {})\n",
                        cfg.horizon(),
                        render_domain(&cfg)
                    ),
                )
            }
        }
        OracleVerdict::Counterexample { rho_in } => {
            let trace = counterexample_trace(&spec, &rho_in);
            if json {
                let inputs: serde_json::Map<String, serde_json::Value> =
                    rho_in.iter().map(|(name, w)| (name.to_string(), json!(w.cells()))).collect();
                CliOutput::out(
                    1,
                    json_line(&json!({
                        "status": "counterexample",
                        "horizon": cfg.horizon(),
                        "domain": domain,
                        "inputs": inputs,
                        "trace": trace,
                    })),
                )
            } else {
                CliOutput {
                    code: 1,
                    stdout: trace,
                    stderr: format!(
                        "counterexample: no output trace satisfies the specification for this input trace (horizon {}, domain {})\n",
                        cfg.horizon(),
                        render_domain(&cfg)
                    ),
                }
            }
        }
    }
}

/// The counterexample as a trace file, columns in declaration order.
fn counterexample_trace(spec: &Spec, rho_in: &StreamMap) -> String {
    if spec.inputs.is_empty() {
        return trace_to_string(rho_in);
    }
    let order: Vec<&Ident> = spec.inputs.iter().collect();
    let mut buf = Vec::new();
    write_trace(rho_in, &order, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}
