//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stdout,
//! bypassing the harness capture, so the verdicts show up in plain
//! `cargo test` output.
//!
//! Timing criteria (6, 7) take several minutes each; all tests hold a shared
//! lock so measurements never overlap with other work in this binary.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::{Mutex, MutexGuard, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpsolve::bench::{
    fit_power_law, generate_instance, mean_runtimes, run_benchmark, BenchConfig, BenchRecord,
    InstanceSpec, Method,
};
use tpsolve::simplex::find_cycle;
use tpsolve::{
    brute_force_optimum, build_initial_plan, check_certificate, default_params, solve_shortlist,
    solve_to_optimality, Cell, InitRule, PivotStrategy, Problem, TransportPlan,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "[acceptance] criterion {id} ({name}): {verdict} {detail}"
    );
    let _ = out.flush();
}

/// All thirteen rules under all three pivot strategies, plus the shortlist
/// method with default parameters.
fn every_configuration(p: &Problem) -> Vec<(String, TransportPlan, f64)> {
    let mut out = Vec::with_capacity(40);
    for rule in InitRule::ALL {
        let start = build_initial_plan(p, rule).unwrap();
        for pivot in PivotStrategy::ALL {
            let sol = solve_to_optimality(p, start.clone(), pivot).unwrap();
            out.push((format!("{rule}/{pivot}"), sol.plan, sol.objective));
        }
    }
    let sol = solve_shortlist(p, None).unwrap();
    out.push(("shortlist".into(), sol.plan, sol.objective));
    out
}

fn small_integer_instance(rng: &mut ChaCha8Rng) -> Problem {
    let m = rng.random_range(2..=4usize);
    let n = rng.random_range(2..=4usize);
    let mut a: Vec<u32> = (0..m).map(|_| rng.random_range(1..=20)).collect();
    let mut b: Vec<u32> = (0..n).map(|_| rng.random_range(1..=20)).collect();
    let c: Vec<f64> = (0..m * n)
        .map(|_| f64::from(rng.random_range(0..=99u32)))
        .collect();
    let (sa, sb): (u32, u32) = (a.iter().sum(), b.iter().sum());
    if sa > sb {
        b[n - 1] += sa - sb;
    } else {
        a[m - 1] += sb - sa;
    }
    let f = |v: Vec<u32>| v.into_iter().map(f64::from).collect();
    Problem::new(f(a), f(b), c).unwrap()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let mut mismatches = Vec::new();
    let mut solves = 0;
    for k in 0..200 {
        let p = small_integer_instance(&mut rng);
        let best = brute_force_optimum(&p).unwrap();
        for (label, _, obj) in every_configuration(&p) {
            solves += 1;
            if obj != best {
                mismatches.push(format!("instance {k} {label}: {obj} != {best}"));
            }
        }
    }
    let pass = mismatches.is_empty();
    report(
        1,
        "oracle equivalence",
        pass,
        &format!(
            "{solves} solves on 200 instances, {} mismatches",
            mismatches.len()
        ),
    );
    assert!(pass, "{mismatches:#?}");
}

struct BenchInstanceResult {
    n: usize,
    cert_failures: Vec<String>,
    worst_min_rc_ratio: f64,
    worst_residual_ratio: f64,
    spread: f64,
}

/// Criteria 2 and 3 share 100 benchmark instances, n in {20, 50, 100}.
fn benchmark_instance_results() -> &'static [BenchInstanceResult] {
    static RESULTS: OnceLock<Vec<BenchInstanceResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let sizes = [20, 50, 100];
        (0..100)
            .map(|k| {
                let n = sizes[k % 3];
                let inst = generate_instance(InstanceSpec {
                    n,
                    seed: 0xCE27 + k as u64,
                })
                .unwrap();
                let p = &inst.problem;
                let cost_tol = 1e-9 * p.max_abs_cost();
                let mass_tol = 1e-9 * p.total_supply();
                let mut r = BenchInstanceResult {
                    n,
                    cert_failures: Vec::new(),
                    worst_min_rc_ratio: 0.0,
                    worst_residual_ratio: 0.0,
                    spread: 0.0,
                };
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for (label, plan, obj) in every_configuration(p) {
                    let cert = check_certificate(p, &plan).unwrap();
                    let rc = (-cert.min_relative_cost).max(0.0) / cost_tol;
                    let res = cert.feasibility_residual / mass_tol;
                    r.worst_min_rc_ratio = r.worst_min_rc_ratio.max(rc);
                    r.worst_residual_ratio = r.worst_residual_ratio.max(res);
                    if cert.min_relative_cost < -cost_tol || cert.feasibility_residual > mass_tol {
                        r.cert_failures
                            .push(format!("n={n} #{k} {label}: {cert:?}"));
                    }
                    lo = lo.min(obj);
                    hi = hi.max(obj);
                }
                r.spread = (hi - lo) / lo.abs();
                r
            })
            .collect()
    })
}

#[test]
fn criterion_2_certificate_soundness() {
    let _guard = serial();
    let results = benchmark_instance_results();
    let failures: Vec<_> = results
        .iter()
        .flat_map(|r| r.cert_failures.iter())
        .collect();
    let worst_rc = results
        .iter()
        .map(|r| r.worst_min_rc_ratio)
        .fold(0.0, f64::max);
    let worst_res = results
        .iter()
        .map(|r| r.worst_residual_ratio)
        .fold(0.0, f64::max);
    let pass = failures.is_empty();
    report(
        2,
        "certificate soundness",
        pass,
        &format!(
            "100 instances x 40 configurations; worst -minRC = {worst_rc:.3} x tol, worst residual = {worst_res:.3} x tol"
        ),
    );
    assert!(pass, "{failures:#?}");
}

#[test]
fn criterion_3_cross_method_agreement() {
    let _guard = serial();
    let results = benchmark_instance_results();
    let (worst_n, worst) = results
        .iter()
        .map(|r| (r.n, r.spread))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let pass = worst <= 1e-9;
    report(
        3,
        "cross-method agreement",
        pass,
        &format!(
            "max relative spread {worst:.3e} (n={worst_n}) over 40 configurations, limit 1e-9"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_parameter_rule() {
    let _guard = serial();
    let got: Vec<_> = [200, 400, 800, 1600]
        .iter()
        .map(|&n| default_params(n))
        .collect();
    let s: Vec<_> = got.iter().map(|p| p.s).collect();
    let pass = s == [15, 30, 45, 60] && got.iter().all(|p| p.k == p.s && p.p == 0.05);
    report(
        4,
        "parameter rule",
        pass,
        &format!("s = {s:?}, k = s, p = 0.05"),
    );
    assert!(pass, "{got:?}");
}

#[test]
fn criterion_5_worked_cycle() {
    let _guard = serial();
    // A=(1,2) B=(2,1) C=(2,2) D=(2,3) E=(3,3), F=(3,1) entering; zero-based below.
    let (a, b, c, d, e, f) = (
        Cell::new(0, 1),
        Cell::new(1, 0),
        Cell::new(1, 1),
        Cell::new(1, 2),
        Cell::new(2, 2),
        Cell::new(2, 0),
    );
    let forward = vec![f, b, d, e];
    let mirrored = vec![f, e, d, b];
    let mut pass = true;
    let mut details = Vec::new();
    for (xb, xe) in [(4.0, 3.0), (2.0, 5.0), (3.0, 3.0)] {
        let basis = TransportPlan::from_triples(
            3,
            3,
            [
                (a.row, a.col, 1.0),
                (b.row, b.col, xb),
                (c.row, c.col, 1.0),
                (d.row, d.col, 1.0),
                (e.row, e.col, xe),
            ],
        )
        .unwrap();
        let cycle = find_cycle(&basis, f).unwrap();
        let shape_ok = cycle.cells == forward || cycle.cells == mirrored;
        let theta_ok = cycle.theta == f64::min(xb, xe);
        let gains: Vec<_> = cycle.gaining().collect();
        let losses: Vec<_> = cycle.losing().collect();
        let signs_ok = gains.contains(&f)
            && gains.contains(&d)
            && losses.contains(&b)
            && losses.contains(&e)
            && !cycle.cells.contains(&a)
            && !cycle.cells.contains(&c);
        pass &= shape_ok && theta_ok && signs_ok;
        details.push(format!("x_B={xb} x_E={xe}: theta={}", cycle.theta));
    }
    report(
        5,
        "worked cycle example",
        pass,
        &format!(
            "cycle F+ E- D+ B- (mirror of F+ B- D+ E-); {}",
            details.join(", ")
        ),
    );
    assert!(pass);
}

fn means_by_method(records: &[BenchRecord]) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.failed()) {
        let e = acc.entry(r.method.clone()).or_default();
        e.0 += r.total_ms;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (s, c))| (k, s / c as f64))
        .collect()
}

fn fastest_competitor(means: &BTreeMap<String, f64>) -> (String, f64) {
    means
        .iter()
        .filter(|(k, _)| k.as_str() != "shortlist")
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k.clone(), *v))
        .unwrap()
}

fn assert_no_failed_rows(records: &[BenchRecord]) {
    let failed: Vec<_> = records.iter().filter(|r| r.failed()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn criterion_6_shortlist_advantage() {
    let _guard = serial();
    let config = BenchConfig {
        sizes: vec![1000],
        reps: 20,
        methods: Method::all(),
        pivots: vec![PivotStrategy::ModifiedRowMostNegative],
        base_seed: 0x5A06,
        warmup: true,
        workers: 1,
        shortlist_params: None,
    };
    let records = run_benchmark(&config).unwrap();
    assert_no_failed_rows(&records);
    let means = means_by_method(&records);
    let shortlist = means["shortlist"];
    let (best, best_ms) = fastest_competitor(&means);
    let ratio = shortlist / best_ms;
    let pass = ratio <= 0.7;
    report(
        6,
        "shortlist advantage",
        pass,
        &format!(
            "n=1000, 20 paired instances: shortlist {shortlist:.1} ms, fastest competitor {best}/modrow {best_ms:.1} ms, ratio {ratio:.3} (limit 0.7)"
        ),
    );
    assert!(pass, "{means:#?}");
}

struct ScalingOutcome {
    competitor: String,
    q_shortlist: f64,
    q_competitor: f64,
}

impl ScalingOutcome {
    fn passes(&self) -> bool {
        (2.0..=3.0).contains(&self.q_shortlist) && self.q_shortlist < self.q_competitor
    }
}

fn scaling_run(base_seed: u64) -> ScalingOutcome {
    let modrow = vec![PivotStrategy::ModifiedRowMostNegative];
    // Pilot: the fastest rule at a mid size is the competitor.
    let pilot = run_benchmark(&BenchConfig {
        sizes: vec![800],
        reps: 3,
        methods: InitRule::ALL.into_iter().map(Method::Init).collect(),
        pivots: modrow.clone(),
        base_seed: base_seed ^ 0xF11,
        warmup: true,
        workers: 1,
        shortlist_params: None,
    })
    .unwrap();
    assert_no_failed_rows(&pilot);
    let (competitor, _) = fastest_competitor(&means_by_method(&pilot));
    let competitor_method: Method = competitor.parse().unwrap();

    let records = run_benchmark(&BenchConfig {
        sizes: vec![400, 800, 1600, 3200],
        reps: 10,
        methods: vec![Method::Shortlist, competitor_method],
        pivots: modrow,
        base_seed,
        warmup: true,
        workers: 1,
        shortlist_params: None,
    })
    .unwrap();
    assert_no_failed_rows(&records);
    let of =
        |name: &str| -> Vec<&BenchRecord> { records.iter().filter(|r| r.method == name).collect() };
    let fs = fit_power_law(of("shortlist")).unwrap();
    let fc = fit_power_law(of(&competitor)).unwrap();
    let mut out = std::io::stdout().lock();
    for name in ["shortlist", competitor.as_str()] {
        let means: Vec<String> = mean_runtimes(of(name))
            .iter()
            .map(|(n, r)| format!("{n}:{r:.0}ms"))
            .collect();
        let _ = writeln!(
            out,
            "[acceptance]   seed {base_seed:#x} {name}: {}",
            means.join(" ")
        );
    }
    ScalingOutcome {
        competitor,
        q_shortlist: fs.exponent,
        q_competitor: fc.exponent,
    }
}

#[test]
fn criterion_7_scaling_exponent() {
    let _guard = serial();
    let seeds = [0x5CA1E, 0x5CA1F];
    let mut outcomes = Vec::new();
    // One fresh-seed re-run is allowed before declaring a failure.
    for seed in seeds {
        let o = scaling_run(seed);
        let pass = o.passes();
        outcomes.push((seed, o));
        if pass {
            break;
        }
    }
    let (seed, last) = outcomes.last().unwrap();
    let pass = last.passes();
    let tried: Vec<String> = outcomes
        .iter()
        .map(|(s, o)| {
            format!(
                "seed {s:#x}: q_shortlist={:.4}, q_{}={:.4}",
                o.q_shortlist, o.competitor, o.q_competitor
            )
        })
        .collect();
    report(
        7,
        "scaling exponent",
        pass,
        &format!(
            "n in {{400,800,1600,3200}} x 10 reps; {} (decided by seed {seed:#x}; need 2 <= q_shortlist <= 3 and q_shortlist < q_competitor)",
            tried.join("; ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_phase_monotonicity() {
    let _guard = serial();
    let mut violations = Vec::new();
    for k in 0..50 {
        let inst = generate_instance(InstanceSpec {
            n: 100,
            seed: 0x9A5E + k,
        })
        .unwrap();
        let p = &inst.problem;
        let sol = solve_shortlist(p, None).unwrap();
        let o: Vec<f64> = sol.stats.phases.iter().map(|ph| ph.objective).collect();
        let cert = check_certificate(p, &sol.plan).unwrap();
        let reference = solve_to_optimality(
            p,
            build_initial_plan(p, InitRule::Vogel).unwrap(),
            PivotStrategy::MatrixMostNegative,
        )
        .unwrap()
        .objective;
        let matches = (o[3] - reference).abs() <= 1e-9 * reference.abs();
        if !(o[1] >= o[2] && o[2] >= o[3] && cert.is_optimal(p) && matches && o[3] == sol.objective)
        {
            violations.push(format!(
                "seed #{k}: phases {o:?}, reference {reference}, {cert:?}"
            ));
        }
    }
    let pass = violations.is_empty();
    report(
        8,
        "phase monotonicity",
        pass,
        &format!("50 instances at n=100, {} violations", violations.len()),
    );
    assert!(pass, "{violations:#?}");
}

#[test]
fn criterion_9_determinism() {
    let _guard = serial();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> String {
        let path = dir.path().join(name);
        let args = [
            "tpsolve",
            "bench",
            "--sizes",
            "30,60",
            "--reps",
            "3",
            "--methods",
            "all",
            "--pivots",
            "matrix,first,modrow",
            "--seed",
            "77",
            "--out",
            path.to_str().unwrap(),
        ];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = tpsolve::cli::run_with(args, &mut out, &mut err);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        std::fs::read_to_string(path).unwrap()
    };
    let strip_timing = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|(i, _)| *i != 5 && *i != 6)
                    .map(|(_, f)| f)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let (sa, sb) = (strip_timing(&a), strip_timing(&b));
    let rows = sa.len().saturating_sub(2);
    let pass = sa == sb && rows == 2 * 3 * 14 * 3;
    report(
        9,
        "determinism",
        pass,
        &format!("two bench runs, {rows} rows each, identical apart from init_ms/total_ms"),
    );
    assert!(pass);
}
