//! `psi-special`: evaluate Ψ functions, tabulate them, and run identity suites.
//!
//! Exit codes: 0 ok, 1 usage or domain error, 2 identity checks failed,
//! 3 an evaluation did not converge.

mod eval;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use psi_special::identities::{run_suite, Suite, DEFAULT_SEED};
use psi_special::EvalPolicy;
use serde::Serialize;

use crate::eval::{evaluate, EvalOutput, Evaluation, Function, ParamRecord};

const EXIT_USAGE: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_UNCONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "psi-special", version, about = "Wright-kernel gamma, beta and hypergeometric functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at one point and print a JSON object.
    Eval(EvalArgs),
    /// Evaluate a function along a grid in one variable and print CSV.
    Table(TableArgs),
    /// Run an identity suite and print a JSON array of reports.
    Check(CheckArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    /// wright, psi-gamma, psi-gamma-kernel, psi-beta, psi-2f1 or psi-1f1.
    #[arg(long = "fn", value_name = "NAME")]
    function: Function,
    #[command(flatten)]
    params: ParamArgs,
    /// Integral representation (psi-beta: unit|trig|rational; psi-2f1:
    /// series|euler|rational|trig; psi-1f1: series|euler|reflected).
    #[arg(long)]
    route: Option<String>,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TableArgs {
    #[arg(long = "fn", value_name = "NAME")]
    function: Function,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    route: Option<String>,
    /// Parameter that runs along the grid.
    #[arg(long)]
    var: String,
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    /// Number of evenly spaced points, ends included.
    #[arg(long, default_value_t = 11)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Output::Csv)]
    output: Output,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// all, gamma, beta, hyp, mellin, transforms or reductions.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Seed of the random parameter draws.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: number of processors).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Inline JSON record of parameters, e.g. '{"alpha":0.5,"beta":2}'.
    /// Individual flags take precedence.
    #[arg(long, value_name = "JSON")]
    params_json: Option<String>,
}

impl ParamArgs {
    fn record(&self) -> Result<ParamRecord> {
        let base = match &self.params_json {
            Some(json) => serde_json::from_str(json).context("invalid --params-json")?,
            None => ParamRecord::default(),
        };
        Ok(base.overlay(ParamRecord {
            alpha: self.alpha,
            beta: self.beta,
            p: self.p,
            a: self.a,
            b: self.b,
            c: self.c,
            x: self.x,
            y: self.y,
            z: self.z,
            s: self.s,
        }))
    }
}

#[derive(Args)]
struct PolicyArgs {
    /// Relative tolerance of each evaluation.
    #[arg(long)]
    tol: Option<f64>,
    /// Absolute tolerance of each evaluation.
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
    /// Largest working precision, in decimal digits.
    #[arg(long)]
    max_digits: Option<u32>,
    /// Largest quadrature refinement level.
    #[arg(long)]
    max_levels: Option<u32>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<EvalPolicy> {
        let d = EvalPolicy::default();
        let policy = EvalPolicy {
            target_abs_tol: self.abs_tol.unwrap_or(d.target_abs_tol),
            target_rel_tol: self.tol.unwrap_or(d.target_rel_tol),
            max_terms: self.max_terms.unwrap_or(d.max_terms),
            max_precision_digits: self.max_digits.unwrap_or(d.max_precision_digits),
            quad_max_levels: self.max_levels.unwrap_or(d.quad_max_levels),
        };
        policy.validate()?;
        Ok(policy)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<u8> {
    let policy = args.policy.policy()?;
    let record = args.params.record()?;
    let params = record.used_by(args.function)?;
    let evaluation = evaluate(args.function, &record, args.route.as_deref(), &policy)?;
    let output = EvalOutput::new(args.function, params, args.route.as_deref(), &evaluation);
    emit(&args.out, &(serde_json::to_string(&output)? + "\n"))?;
    Ok(match evaluation {
        Evaluation::Done(_) => 0,
        Evaluation::Unconverged { reason, .. } => {
            eprintln!("not converged: {reason}");
            EXIT_UNCONVERGED
        }
    })
}

#[derive(Serialize)]
struct TableRow {
    #[serde(flatten)]
    point: std::collections::BTreeMap<String, f64>,
    value: f64,
    abs_err_est: f64,
    converged: bool,
}

fn grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        bail!("--count must be at least 1");
    }
    if !start.is_finite() || !stop.is_finite() {
        bail!("grid ends must be finite");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { stop } else { start + (stop - start) * (i as f64) / last })
        .collect())
}

fn cmd_table(args: &TableArgs) -> Result<u8> {
    let policy = args.policy.policy()?;
    let base = args.params.record()?;
    if !args.function.inputs().contains(&args.var.as_str()) {
        bail!(
            "--var {} is not a parameter of --fn {} (expected one of: {})",
            args.var,
            args.function,
            args.function.inputs().join(", ")
        );
    }
    let mut rows = Vec::new();
    let mut all_converged = true;
    for v in grid(args.start, args.stop, args.count)? {
        let mut record = base;
        record.set(&args.var, v)?;
        let evaluation = evaluate(args.function, &record, args.route.as_deref(), &policy)?;
        let a = evaluation.approx();
        let converged = matches!(evaluation, Evaluation::Done(_)) && a.converged;
        all_converged &= converged;
        rows.push(TableRow {
            point: [(args.var.clone(), v)].into_iter().collect(),
            value: a.value,
            abs_err_est: a.abs_err_est,
            converged,
        });
    }
    let text = match args.output {
        Output::Csv => {
            let mut text = format!("{},value,abs_err_est,converged\n", args.var);
            for r in &rows {
                text.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{}\n",
                    r.point[&args.var], r.value, r.abs_err_est, r.converged
                ));
            }
            text
        }
        Output::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(&args.out, &text)?;
    if all_converged {
        Ok(0)
    } else {
        eprintln!("some grid points did not converge");
        Ok(EXIT_UNCONVERGED)
    }
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    passed: usize,
    failed: usize,
    wall_time_s: f64,
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let policy = args.policy.policy()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().context("cannot start worker threads")?;
    let started = Instant::now();
    let reports = pool.install(|| run_suite(args.suite, args.seed, &policy));
    let passed = reports.iter().filter(|r| r.pass).count();
    // the summary carries a wall time, so it goes to stderr to keep stdout reproducible
    let summary = Summary {
        total: reports.len(),
        passed,
        failed: reports.len() - passed,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    emit(&args.out, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} (rel residual {:e}, tolerance {:e})", r.identity_id, r.rel_residual, r.tolerance);
    }
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(if summary.failed == 0 { 0 } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Table(args) => cmd_table(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
