//! `schatten`: runs the packing solvers and robust PCA pipelines on generated
//! or stored instances, re-validates every certificate, and writes a results
//! CSV plus a JSON summary.
//!
//! Exit codes: 0 on success, 2 when a certificate or invariant check fails,
//! 1 on usage or runtime errors.

mod check;
mod config;
mod results;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, FileConfig, Overrides, Task};

/// Environment variable holding the default seed.
const SEED_ENV: &str = "SCHATTEN_SEED";

#[derive(Parser)]
#[command(name = "schatten", version, about = "Schatten-norm packing solvers and robust PCA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an l_p or l_inf packing LP.
    SolveLp(RunArgs),
    /// Solve a Schatten-p packing SDP.
    SolveSdp(RunArgs),
    /// Minimize a Schatten-p norm over a box-constrained simplex.
    SolveBoxed(RunArgs),
    /// Robust PCA by iterative filtering.
    PcaFilter(RunArgs),
    /// Robust PCA by boxed Schatten packing and power iteration.
    PcaFast(RunArgs),
    /// Repeat a task over a grid of eps values and seeds.
    Sweep(SweepArgs),
    /// Re-validate the certificates recorded in a results file.
    Check(CheckArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// JSON experiment config; flags take precedence over its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file (LP CSV, SDP directory, or dataset CSV with sidecar).
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Norm order, a number or "inf".
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of candidate directions for pca-fast.
    #[arg(long)]
    t: Option<usize>,
    /// First seed; defaults to $SCHATTEN_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to run.
    #[arg(long)]
    seeds: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump per-iteration potentials under <out>/traces.
    #[arg(long)]
    trace: bool,
    /// Also report the non-robust top eigenvector.
    #[arg(long)]
    naive: bool,
    /// Use sketched gradients in solve-sdp.
    #[arg(long)]
    sketched: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Task run at every grid point.
    #[arg(long)]
    task: Option<String>,
    /// Comma-separated eps grid.
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
}

#[derive(Args)]
struct CheckArgs {
    /// results.csv written by an earlier run.
    results: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every check passed.
fn dispatch(command: Command) -> Result<bool> {
    let (task, run, sweep_task, eps_list) = match command {
        Command::Check(args) => return run_check(&args.results),
        Command::SolveLp(a) => (Task::PackingLp, a, None, None),
        Command::SolveSdp(a) => (Task::PackingSdp, a, None, None),
        Command::SolveBoxed(a) => (Task::Boxed, a, None, None),
        Command::PcaFilter(a) => (Task::FilterPca, a, None, None),
        Command::PcaFast(a) => (Task::FastPca, a, None, None),
        Command::Sweep(s) => (Task::Sweep, s.run, s.task, s.eps_list),
    };
    let file = match &run.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(s) => Some(s.trim().parse().with_context(|| format!("{SEED_ENV}={s:?} is not a seed"))?),
        Err(_) => None,
    };
    let flags = Overrides {
        instance: run.instance,
        eps: run.eps,
        delta: run.delta,
        p: run.p,
        alpha: run.alpha,
        t: run.t,
        seed: run.seed,
        seeds: run.seeds,
        out: run.out,
        trace: run.trace,
        naive: run.naive,
        sketched: run.sketched,
        sweep_task,
        eps_list,
    };
    let cfg = ExperimentConfig::resolve(task, file, flags, env_seed)?;
    let report = tasks::run(&cfg)?;
    results::write_results(&cfg.output.join("results.csv"), &report.rows)?;
    let summary = report.summary(&cfg)?;
    summary.save(&cfg.output.join("summary.json"))?;
    for f in &summary.failures {
        eprintln!("check failed: {f}");
    }
    println!(
        "{}: {} rows, {} checks passed, {} failed; results in {}",
        cfg.task.name(),
        summary.rows,
        summary.certificate_checks.passed,
        summary.certificate_checks.failed,
        cfg.output.display()
    );
    Ok(summary.all_checks_passed)
}

fn run_check(path: &std::path::Path) -> Result<bool> {
    let checks = check::check_results(path)?;
    let mut ok = true;
    for c in &checks {
        println!("row {}: {} ({})", c.line, if c.passed { "pass" } else { "FAIL" }, c.detail);
        ok &= c.passed;
    }
    println!("{} rows checked, {}", checks.len(), if ok { "all passed" } else { "failures found" });
    Ok(ok)
}
