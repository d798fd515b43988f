//! Random benchmark instances, timed method sweeps, and power-law fits of
//! runtime against problem size.
//!
//! Instances place `n` origins and `n` destinations at distinct points of a
//! 512 x 512 lattice, draw integer masses uniformly from `1..=255`, balance
//! the totals on the last destination (or origin), and use Euclidean
//! distances as costs.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::init::{build_initial_plan, InitRule};
use crate::problem::Problem;
use crate::shortlist::{solve_shortlist_with, ShortlistParams};
use crate::simplex::{solve_to_optimality, PivotStrategy};

pub const GRID_SIZE: u32 = 512;
pub const MASS_MIN: u32 = 1;
pub const MASS_MAX: u32 = 255;

/// Identifier of the random generator, written into benchmark CSV files.
pub const RNG_ID: &str = "chacha8";

pub const CSV_HEADER: &str =
    "method,pivot,n,rep,seed,init_ms,total_ms,pivots,cells_scanned,objective";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    /// Number of origins, and of destinations.
    pub n: usize,
    pub seed: u64,
}

/// A generated problem with the lattice points behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub problem: Problem,
    pub origins: Vec<(u32, u32)>,
    pub destinations: Vec<(u32, u32)>,
}

/// Builds the benchmark instance for `spec`; fully determined by the seed.
pub fn generate_instance(spec: InstanceSpec) -> Result<GeneratedInstance> {
    let n = spec.n;
    let cells = (GRID_SIZE as usize).pow(2);
    if n == 0 || 2 * n > cells {
        return Err(Error::InvalidParams(format!(
            "cannot place 2 x {n} distinct points on a {GRID_SIZE}x{GRID_SIZE} grid"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut taken = HashSet::with_capacity(2 * n);
    let mut points = Vec::with_capacity(2 * n);
    while points.len() < 2 * n {
        let p = (
            rng.random_range(0..GRID_SIZE),
            rng.random_range(0..GRID_SIZE),
        );
        if taken.insert(p) {
            points.push(p);
        }
    }
    let destinations = points.split_off(n);
    let origins = points;

    let mut draw = |k: usize| -> Vec<u64> {
        (0..k)
            .map(|_| u64::from(rng.random_range(MASS_MIN..=MASS_MAX)))
            .collect()
    };
    let mut supply = draw(n);
    let mut demand = draw(n);
    let (sa, sb): (u64, u64) = (supply.iter().sum(), demand.iter().sum());
    if sa > sb {
        demand[n - 1] += sa - sb;
    } else {
        supply[n - 1] += sb - sa;
    }

    let mut cost = Vec::with_capacity(n * n);
    for &(ox, oy) in &origins {
        for &(dx, dy) in &destinations {
            let (ddx, ddy) = (f64::from(ox) - f64::from(dx), f64::from(oy) - f64::from(dy));
            cost.push(ddx.hypot(ddy));
        }
    }
    let problem = Problem::new(
        supply.into_iter().map(|a| a as f64).collect(),
        demand.into_iter().map(|b| b as f64).collect(),
        cost,
    )?;
    Ok(GeneratedInstance {
        problem,
        origins,
        destinations,
    })
}

/// Seed of repetition `rep` at size `n`, derived from a base seed.
pub fn instance_seed(base_seed: u64, n: usize, rep: usize) -> u64 {
    base_seed ^ splitmix64(((n as u64) << 32) ^ rep as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A solution method: an initialization rule followed by the simplex, or
/// the shortlist method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Init(InitRule),
    Shortlist,
}

impl Method {
    /// All thirteen initialization rules and the shortlist method.
    pub fn all() -> Vec<Method> {
        InitRule::ALL
            .into_iter()
            .map(Method::Init)
            .chain(std::iter::once(Method::Shortlist))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Init(rule) => rule.name(),
            Method::Shortlist => "shortlist",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "shortlist" {
            Ok(Method::Shortlist)
        } else {
            s.parse()
                .map(Method::Init)
                .map_err(|_| Error::InvalidParams(format!("unknown method `{s}`")))
        }
    }
}

/// Outcome of one timed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub init: Duration,
    pub total: Duration,
    pub pivots: usize,
    pub cells_scanned: usize,
    pub objective: f64,
}

/// Solves `problem` with `method`; `pivot` drives the simplex (for the
/// shortlist method, its final phase). `params` override the shortlist
/// defaults.
pub fn run_method(
    problem: &Problem,
    method: Method,
    pivot: PivotStrategy,
    params: Option<ShortlistParams>,
) -> Result<Run> {
    match method {
        Method::Init(rule) => {
            let start = Instant::now();
            let plan = build_initial_plan(problem, rule)?;
            let init = start.elapsed();
            let sol = solve_to_optimality(problem, plan, pivot)?;
            let total = start.elapsed();
            Ok(Run {
                init,
                total,
                pivots: sol.stats.pivots,
                cells_scanned: sol.stats.cells_scanned,
                objective: sol.objective,
            })
        }
        Method::Shortlist => {
            let params = params.unwrap_or_else(|| crate::shortlist::default_params(problem.cols()));
            let start = Instant::now();
            let sol = solve_shortlist_with(problem, params, pivot)?;
            let total = start.elapsed();
            let counts = sol.stats.total();
            Ok(Run {
                init: sol.stats.init_elapsed().min(total),
                total,
                pivots: counts.pivots,
                cells_scanned: counts.cells_scanned,
                objective: sol.objective,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub pivots: Vec<PivotStrategy>,
    pub base_seed: u64,
    /// Run every (method, pivot) once per size on an untimed instance first.
    pub warmup: bool,
    /// Worker threads; 1 runs everything on the calling thread.
    pub workers: usize,
    pub shortlist_params: Option<ShortlistParams>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![100, 200],
            reps: 10,
            methods: Method::all(),
            pivots: vec![PivotStrategy::ModifiedRowMostNegative],
            base_seed: 1,
            warmup: true,
            workers: 1,
            shortlist_params: None,
        }
    }
}

/// One row of benchmark output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: String,
    pub pivot: String,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub init_ms: f64,
    pub total_ms: f64,
    pub pivots: usize,
    pub cells_scanned: usize,
    /// `NaN` for failed runs.
    pub objective: f64,
    pub failure: Option<String>,
}

impl BenchRecord {
    pub fn failed(&self) -> bool {
        self.failure.is_some() || self.objective.is_nan()
    }
}

/// Runs every (size, repetition) instance through every (method, pivot)
/// pair. All methods of one repetition see the same instance.
///
/// Records come back ordered by size, repetition, method, pivot. A failing
/// solve becomes a failed record; the sweep continues.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if config.methods.is_empty() || config.pivots.is_empty() {
        return Err(Error::InvalidParams(
            "no methods or pivot strategies".into(),
        ));
    }
    if let Some(params) = config.shortlist_params {
        params.validate()?;
    }
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.reps).map(move |rep| (n, rep)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;

    if config.warmup {
        for &n in &config.sizes {
            // A seed no timed repetition uses.
            let seed = instance_seed(!config.base_seed, n, usize::MAX >> 1);
            let inst = generate_instance(InstanceSpec { n, seed })?;
            for &method in &config.methods {
                for &pivot in &config.pivots {
                    let _ = run_method(&inst.problem, method, pivot, config.shortlist_params);
                }
            }
        }
    }

    let run_job = |&(n, rep): &(usize, usize)| -> Result<Vec<BenchRecord>> {
        let seed = instance_seed(config.base_seed, n, rep);
        let inst = generate_instance(InstanceSpec { n, seed })?;
        let mut out = Vec::with_capacity(config.methods.len() * config.pivots.len());
        for &method in &config.methods {
            for &pivot in &config.pivots {
                let record = match run_method(&inst.problem, method, pivot, config.shortlist_params)
                {
                    Ok(run) => BenchRecord {
                        method: method.name().into(),
                        pivot: pivot.name().into(),
                        n,
                        rep,
                        seed,
                        init_ms: millis(run.init),
                        total_ms: millis(run.total),
                        pivots: run.pivots,
                        cells_scanned: run.cells_scanned,
                        objective: run.objective,
                        failure: None,
                    },
                    Err(e) => BenchRecord {
                        method: method.name().into(),
                        pivot: pivot.name().into(),
                        n,
                        rep,
                        seed,
                        init_ms: 0.0,
                        total_ms: 0.0,
                        pivots: 0,
                        cells_scanned: 0,
                        objective: f64::NAN,
                        failure: Some(e.to_string()),
                    },
                };
                out.push(record);
            }
        }
        Ok(out)
    };

    let batches: Vec<Vec<BenchRecord>> = if config.workers <= 1 {
        jobs.iter().map(run_job).collect::<Result<_>>()?
    } else {
        pool.install(|| jobs.par_iter().map(run_job).collect::<Result<_>>())?
    };
    Ok(batches.into_iter().flatten().collect())
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Formats with six significant digits, like C's `%g`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes records as CSV: a `#` comment line naming the generator, the
/// header line, then one line per record.
pub fn write_csv(records: &[BenchRecord], out: impl Write) -> Result<()> {
    let mut out = out;
    writeln!(
        out,
        "# rng={RNG_ID} grid={GRID_SIZE} masses={MASS_MIN}..{MASS_MAX}"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.method.clone(),
            r.pivot.clone(),
            r.n.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            format_sig6(r.init_ms),
            format_sig6(r.total_ms),
            r.pivots.to_string(),
            r.cells_scanned.to_string(),
            format_sig6(r.objective),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_csv`]; `#` lines are ignored.
pub fn read_csv(input: impl Read) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected CSV header `{}`", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(k + 2, |p| p.line() as usize);
        let field = |idx: usize| row.get(idx).unwrap_or("");
        let bad = |name: &str, value: &str| Error::Parse {
            line,
            message: format!("invalid {name} `{value}`"),
        };
        let int = |idx: usize, name: &str| -> Result<usize> {
            field(idx).parse().map_err(|_| bad(name, field(idx)))
        };
        let float = |idx: usize, name: &str| -> Result<f64> {
            field(idx).parse().map_err(|_| bad(name, field(idx)))
        };
        let objective = float(9, "objective")?;
        out.push(BenchRecord {
            method: field(0).to_owned(),
            pivot: field(1).to_owned(),
            n: int(2, "n")?,
            rep: int(3, "rep")?,
            seed: field(4).parse().map_err(|_| bad("seed", field(4)))?,
            init_ms: float(5, "init_ms")?,
            total_ms: float(6, "total_ms")?,
            pivots: int(7, "pivots")?,
            cells_scanned: int(8, "cells_scanned")?,
            objective,
            failure: objective.is_nan().then(|| "failed run".to_owned()),
        });
    }
    Ok(out)
}

/// Least-squares fit of `ln r = ln c + q ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub factor: f64,
    pub exponent: f64,
    /// Residual sum of squares on the log scale.
    pub rss: f64,
}

/// Fits a power law through `(size, runtime)` points.
pub fn fit_points(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 distinct sizes, got {}",
            sizes.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Fit(format!(
            "sizes and runtimes must be positive, got ({}, {})",
            p.0, p.1
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, r)| (n.ln(), r.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss = logs
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum();
    Ok(FitResult {
        factor: intercept.exp(),
        exponent,
        rss,
    })
}

/// Mean total runtime per size over successful records.
pub fn mean_runtimes<'a>(records: impl IntoIterator<Item = &'a BenchRecord>) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records.into_iter().filter(|r| !r.failed()) {
        let e = acc.entry(r.n).or_default();
        e.0 += r.total_ms;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(n, (sum, count))| (n, sum / count as f64))
        .collect()
}

/// Fits the power law through the per-size mean runtimes of the given
/// records, which should all belong to one method configuration.
pub fn fit_power_law<'a>(records: impl IntoIterator<Item = &'a BenchRecord>) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = mean_runtimes(records)
        .into_iter()
        .map(|(n, r)| (n as f64, r))
        .collect();
    fit_points(&points)
}
