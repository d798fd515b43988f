//! Command-line front end.
//!
//! ```text
//! tpsolve generate --n N --seed S [--out FILE]
//! tpsolve solve    --input FILE --method M [--pivot P] [--s S --k K --p P] [--emd] [--plan-out FILE]
//! tpsolve verify   --input FILE --plan FILE
//! tpsolve bench    --sizes 100,200 [--reps R] [--methods all|m1,m2] [--pivots modrow] [--seed S]
//!                  [--parallel W] [--no-warmup] [--out FILE]
//! tpsolve fit      --in FILE --method M [--pivot P]
//! ```
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when the solver
//! aborts or a plan fails verification. The resolved configuration of every
//! run goes to standard error, results to standard output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig, InstanceSpec, Method};
use crate::error::{Error, Result};
use crate::init::build_initial_plan;
use crate::problem::{Problem, TransportPlan};
use crate::shortlist::{default_params, solve_shortlist_with, ShortlistParams};
use crate::simplex::{solve_to_optimality, PivotStrategy};
use crate::verify::check_certificate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tpsolve",
    version,
    about = "Exact transportation problem solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random benchmark instance.
    Generate(GenerateArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Check a plan against an instance.
    Verify(VerifyArgs),
    /// Time methods over random instances and write CSV.
    Bench(BenchArgs),
    /// Fit runtime = c * n^q to benchmark CSV.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of origins and of destinations.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Initialization rule, or `shortlist`.
    #[arg(long)]
    method: String,
    /// Pivot strategy (for `shortlist`, the strategy of the final phase).
    #[arg(long, default_value = "modrow")]
    pivot: String,
    /// Shortlist length.
    #[arg(long)]
    s: Option<usize>,
    /// Candidates per shortlist batch.
    #[arg(long)]
    k: Option<usize>,
    /// Fraction of origins searched per shortlist batch.
    #[arg(long)]
    p: Option<f64>,
    /// Also print the objective divided by the total mass.
    #[arg(long)]
    emd: bool,
    /// Write the optimal plan to this file.
    #[arg(long)]
    plan_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Comma-separated method names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    methods: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "modrow")]
    pivots: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; the default of 1 keeps timings free of contention.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    no_warmup: bool,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    method: String,
    /// Required when the file holds several pivot strategies for the method.
    #[arg(long)]
    pivot: Option<String>,
}

/// Runs the command line `args` (program name first) against the process
/// standard streams and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a, out, err),
        Command::Solve(a) => solve(a, out, err),
        Command::Verify(a) => verify(a, out, err),
        Command::Bench(a) => run_bench(a, out, err),
        Command::Fit(a) => fit(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IterationLimit { .. }
        | Error::Internal(_)
        | Error::Structural(_)
        | Error::TooLarge { .. } => EXIT_ABORT,
        _ => EXIT_USAGE,
    }
}

fn read_problem(path: &Path) -> Result<Problem> {
    let file = File::open(path).map_err(|e| io_context(e, path))?;
    Problem::read_from(BufReader::new(file))
}

fn io_context(e: io::Error, path: &Path) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn with_output<F>(path: Option<&Path>, out: &mut dyn Write, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_context(e, p))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn shortlist_params(
    n: usize,
    s: Option<usize>,
    k: Option<usize>,
    p: Option<f64>,
) -> Result<ShortlistParams> {
    let d = default_params(n);
    let params = ShortlistParams {
        s: s.unwrap_or(d.s),
        // k follows s unless set explicitly.
        k: k.or(s).unwrap_or(d.k),
        p: p.unwrap_or(d.p),
    };
    params.validate()?;
    Ok(params)
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn generate(a: GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    writeln!(
        err,
        "generate: n={} seed={} rng={} out={}",
        a.n,
        a.seed,
        bench::RNG_ID,
        a.out
            .as_deref()
            .map_or("-".into(), |p| p.display().to_string())
    )?;
    let inst = bench::generate_instance(InstanceSpec {
        n: a.n,
        seed: a.seed,
    })?;
    with_output(a.out.as_deref(), out, |w| inst.problem.write_to(w))?;
    Ok(EXIT_OK)
}

fn solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let method: Method = a.method.parse()?;
    let pivot: PivotStrategy = a.pivot.parse()?;
    let problem = read_problem(&a.input)?;
    let params = match method {
        Method::Shortlist => Some(shortlist_params(problem.cols(), a.s, a.k, a.p)?),
        Method::Init(_) => {
            if a.s.is_some() || a.k.is_some() || a.p.is_some() {
                return Err(Error::InvalidParams(
                    "--s, --k and --p apply to --method shortlist only".into(),
                ));
            }
            None
        }
    };
    write!(
        err,
        "solve: input={} m={} n={} method={method} pivot={pivot}",
        a.input.display(),
        problem.rows(),
        problem.cols()
    )?;
    if let Some(p) = params {
        write!(err, " s={} k={} p={}", p.s, p.k, p.p)?;
    }
    writeln!(err)?;

    let plan: TransportPlan;
    let objective;
    match (method, params) {
        (Method::Init(rule), _) => {
            let start = Instant::now();
            let init = build_initial_plan(&problem, rule)?;
            let init_time = start.elapsed();
            let sol = solve_to_optimality(&problem, init, pivot)?;
            let total = start.elapsed();
            objective = sol.objective;
            writeln!(out, "objective {objective}")?;
            writeln!(out, "pivots {}", sol.stats.pivots)?;
            writeln!(out, "degenerate_pivots {}", sol.stats.degenerate_pivots)?;
            writeln!(out, "cells_scanned {}", sol.stats.cells_scanned)?;
            writeln!(out, "init_ms {}", ms(init_time))?;
            writeln!(out, "simplex_ms {}", ms(total - init_time))?;
            writeln!(out, "total_ms {}", ms(total))?;
            plan = sol.plan;
        }
        (Method::Shortlist, Some(params)) => {
            let sol = solve_shortlist_with(&problem, params, pivot)?;
            objective = sol.objective;
            let total = sol.stats.total();
            writeln!(out, "objective {objective}")?;
            writeln!(out, "pivots {}", total.pivots)?;
            writeln!(out, "degenerate_pivots {}", sol.degenerate_pivots)?;
            writeln!(out, "cells_scanned {}", total.cells_scanned)?;
            for (k, phase) in sol.stats.phases.iter().enumerate() {
                writeln!(
                    out,
                    "phase{} ms={} pivots={} cells_scanned={} objective={}",
                    k + 1,
                    ms(phase.elapsed),
                    phase.pivots,
                    phase.cells_scanned,
                    phase.objective
                )?;
            }
            writeln!(out, "total_ms {}", ms(sol.stats.elapsed()))?;
            plan = sol.plan;
        }
        (Method::Shortlist, None) => unreachable!("shortlist parameters resolved above"),
    }
    if a.emd {
        writeln!(out, "emd {}", objective / problem.total_supply())?;
    }
    if let Some(path) = a.plan_out.as_deref() {
        with_output(Some(path), out, |w| plan.write_to(w))?;
    }
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    writeln!(
        err,
        "verify: input={} plan={}",
        a.input.display(),
        a.plan.display()
    )?;
    let problem = read_problem(&a.input)?;
    let text = std::fs::read_to_string(&a.plan).map_err(|e| io_context(e, &a.plan))?;
    let plan = TransportPlan::parse(&text)?;
    let cert = check_certificate(&problem, &plan)?;
    let optimal = cert.is_optimal(&problem);
    writeln!(out, "min_relative_cost {}", cert.min_relative_cost)?;
    match cert.worst_cell {
        Some(c) => writeln!(out, "worst_cell {c}")?,
        None => writeln!(out, "worst_cell none")?,
    }
    writeln!(out, "feasibility_residual {}", cert.feasibility_residual)?;
    writeln!(out, "dual_objective {}", cert.dual_objective)?;
    writeln!(
        out,
        "primal_objective {}",
        crate::problem::objective(&problem, &plan)?
    )?;
    writeln!(out, "optimal {}", if optimal { "yes" } else { "no" })?;
    Ok(if optimal { EXIT_OK } else { EXIT_ABORT })
}

fn run_bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let methods: Vec<Method> = if a.methods.iter().any(|m| m == "all") {
        Method::all()
    } else {
        a.methods.iter().map(|m| m.parse()).collect::<Result<_>>()?
    };
    let pivots: Vec<PivotStrategy> = a.pivots.iter().map(|p| p.parse()).collect::<Result<_>>()?;
    if a.sizes.contains(&0) || a.reps == 0 {
        return Err(Error::InvalidParams(
            "sizes and reps must be positive".into(),
        ));
    }
    let shortlist_params = if a.s.is_some() || a.k.is_some() || a.p.is_some() {
        // Explicit parameters apply to every size.
        Some(shortlist_params(0, a.s, a.k, a.p)?)
    } else {
        None
    };
    let config = BenchConfig {
        sizes: a.sizes,
        reps: a.reps,
        methods,
        pivots,
        base_seed: a.seed,
        warmup: !a.no_warmup,
        workers: a.parallel,
        shortlist_params,
    };
    writeln!(
        err,
        "bench: sizes={:?} reps={} methods={} pivots={} seed={} workers={} warmup={} rng={}",
        config.sizes,
        config.reps,
        config
            .methods
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(","),
        config
            .pivots
            .iter()
            .map(|p| p.name())
            .collect::<Vec<_>>()
            .join(","),
        config.base_seed,
        config.workers,
        config.warmup,
        bench::RNG_ID
    )?;
    let records = bench::run_benchmark(&config)?;
    let failed = records.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        writeln!(
            err,
            "bench: {failed} failed runs recorded with objective NaN"
        )?;
    }
    with_output(a.out.as_deref(), out, |w| bench::write_csv(&records, w))?;
    Ok(EXIT_OK)
}

fn fit(a: FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    writeln!(
        err,
        "fit: in={} method={} pivot={}",
        a.input.display(),
        a.method,
        a.pivot.as_deref().unwrap_or("any")
    )?;
    let file = File::open(&a.input).map_err(|e| io_context(e, &a.input))?;
    let records = bench::read_csv(BufReader::new(file))?;
    let selected: Vec<_> = records
        .iter()
        .filter(|r| r.method == a.method)
        .filter(|r| a.pivot.as_deref().is_none_or(|p| r.pivot == p))
        .collect();
    let mut pivots: Vec<&str> = selected.iter().map(|r| r.pivot.as_str()).collect();
    pivots.sort_unstable();
    pivots.dedup();
    if pivots.len() > 1 {
        return Err(Error::InvalidParams(format!(
            "method `{}` has several pivot strategies ({}); choose one with --pivot",
            a.method,
            pivots.join(", ")
        )));
    }
    let fit = bench::fit_power_law(selected.iter().copied())?;
    writeln!(out, "c={:.6}, q={:.6}", fit.factor, fit.exponent)?;
    writeln!(out, "rss={}", fit.rss)?;
    Ok(EXIT_OK)
}
