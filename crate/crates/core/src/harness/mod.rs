//! Command-line entry point, experiment configuration, reports and the
//! acceptance checks.
//!
//! Exit status: 0 on success, 1 when a check fails or a run errors, 2 on a
//! usage error.

pub mod acceptance;
mod config;
mod report;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use config::{
    merge, read_config_file, Cli, Command, ContPeelConfig, ExperimentConfig, GenConfig, PeelConfig, RepConfig,
    RwBenchConfig, ThresholdConfig, Variant, VerifyConfig,
};
pub use report::{emit_report, read_json_report, Cell, Format, RunReport, Verdict, SCHEMA};

use crate::analysis::{
    check_heavy_vanish, check_proposition6, parse_grid, peeling_threshold, reference_thresholds,
    simulate_continuous_peeling,
};
use crate::cuckoo::{bulk_insert_experiment, BulkParams};
use crate::error::{Error, Result};
use crate::eviction::{run_parallel_insertion_sim, run_rep, run_rep_prime, Policy, ProcessConfig};
use crate::hypergraph::Hypergraph;
use crate::peeling::{peel, peeling_numbers_recursive, sample_peelable, PeelOutcome};
use crate::rng::derive_seed;

pub const RW_BENCH_COLUMNS: [&str; 10] =
    ["n", "k", "load", "seed", "trial", "keys", "total_moves", "mean_moves", "max_moves", "failures"];
pub const REP_COLUMNS: [&str; 10] =
    ["variant", "policy", "n", "m", "k", "seed", "trial", "rounds", "status", "lemma4_bound"];
pub const CONT_PEEL_COLUMNS: [&str; 6] = ["seed", "t", "B", "H", "L", "tau"];
pub const THRESHOLD_COLUMNS: [&str; 5] = ["k", "lambda_star", "c_delta", "c_delta_3dp", "reference"];
pub const PEEL_COLUMNS: [&str; 3] = ["edge", "target", "peel"];

fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::Domain(_) | Error::OutOfTable { .. } | Error::Json { .. })
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let file = match cli.config.as_deref().map(read_config_file).transpose() {
        Ok(file) => file,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let config = match ExperimentConfig::resolve(cli.command, file.as_ref()) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&config) {
        Ok(report) if report.as_ref().is_none_or(RunReport::all_passed) => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

/// Runs a validated configuration, writes its outputs and returns its
/// report (`gen` has none).
pub fn execute(config: &ExperimentConfig) -> Result<Option<RunReport>> {
    let (report, csv, json) = match config {
        ExperimentConfig::Gen(c) => {
            gen(c)?;
            return Ok(None);
        }
        ExperimentConfig::Peel(c) => (peel_report(c)?, &c.csv, &c.json),
        ExperimentConfig::RwBench(c) => (rw_bench(c)?, &c.csv, &c.json),
        ExperimentConfig::Rep(c) => (rep(c)?, &c.csv, &c.json),
        ExperimentConfig::Thresholds(c) => (thresholds(c)?, &c.csv, &c.json),
        ExperimentConfig::ContPeel(c) => (cont_peel(c)?, &c.csv, &c.json),
        ExperimentConfig::Verify(c) => (verify(c), &None, &c.json),
    };
    if let Some(path) = csv {
        emit_report(&report, Format::Csv, path)?;
    }
    if let Some(path) = json {
        emit_report(&report, Format::Json, path)?;
    }
    for (name, value) in &report.aggregates {
        println!("{name} = {value}");
    }
    Ok(Some(report))
}

fn gen(c: &GenConfig) -> Result<()> {
    let h = Hypergraph::sample(c.n, c.m, c.k, c.seed)?;
    match &c.out {
        Some(path) => std::fs::write(path, h.to_json() + "\n").map_err(|source| Error::Io { path: path.clone(), source }),
        None => {
            println!("{}", h.to_json());
            Ok(())
        }
    }
}

fn peel_report(c: &PeelConfig) -> Result<RunReport> {
    let h = match &c.input {
        Some(path) => Hypergraph::read_json(path)?,
        None => Hypergraph::sample(c.n, c.m, c.k, c.seed)?,
    };
    let mut report = RunReport::new("peel", c, &PEEL_COLUMNS);
    report.aggregate("n", h.n() as f64);
    report.aggregate("m", h.m() as f64);
    match peel(&h, c.seed, c.randomize) {
        PeelOutcome::Peeled(f) => {
            let numbers = peeling_numbers_recursive(&h, &f);
            if h.m() <= c.max_rows {
                for e in 0..h.m() {
                    report.push(vec![e.into(), (f.target(e) as u64).into(), numbers.peel_numbers[e].into()]);
                }
            }
            report.aggregate("peelable", 1.0);
            report.aggregate("core_edges", 0.0);
            report.aggregate("total_peel", numbers.total_peel as f64);
            report.aggregate("total_paths", numbers.total_paths as f64);
            report.aggregate("nontrivial_vertex_paths", numbers.nontrivial_vertex_paths() as f64);
            report.aggregate("overflow", numbers.overflow as u8 as f64);
        }
        PeelOutcome::Stuck { core, .. } => {
            report.aggregate("peelable", 0.0);
            report.aggregate("core_edges", core.edges.len() as f64);
        }
    }
    Ok(report)
}

fn rw_bench(c: &RwBenchConfig) -> Result<RunReport> {
    let summary = bulk_insert_experiment(&BulkParams {
        n: c.n,
        k: c.k,
        load: c.load,
        seed: c.seed,
        exclusion: c.exclusion,
        trials: c.trials,
        move_cap: c.move_cap,
    })?;
    let mut report = RunReport::new("rw-bench", c, &RW_BENCH_COLUMNS);
    for t in &summary.trials {
        report.push(vec![
            c.n.into(),
            c.k.into(),
            c.load.into(),
            t.seed.into(),
            t.trial.into(),
            t.keys.into(),
            t.total_moves.into(),
            t.mean_moves.into(),
            t.max_moves.into(),
            t.failures.into(),
        ]);
    }
    report.aggregate("mean_moves", summary.mean_moves);
    report.aggregate("max_moves", summary.max_moves as f64);
    report.aggregate("failure_rate", summary.failure_rate);
    report.aggregate("total_rounds", summary.total_rounds as f64);
    Ok(report)
}

/// Each trial samples a peelable instance from seed `derive_seed(seed,
/// trial)`, whose random peeling supplies the target orientation, the
/// `max-peel` priorities and the bound `k·(m + Σ peel)`.
fn rep(c: &RepConfig) -> Result<RunReport> {
    let mut report = RunReport::new("rep", c, &REP_COLUMNS);
    let (mut rounds_sum, mut bound_sum, mut done) = (0.0, 0.0, 0u64);
    for trial in 0..c.trials {
        let (h, f, _) = sample_peelable(c.n, c.m, c.k, derive_seed(c.seed, trial), 1000)?;
        let numbers = peeling_numbers_recursive(&h, &f);
        let bound = c.k as u64 * (c.m as u64 + numbers.total_peel);
        let policy = Policy::with_priorities(c.policy, numbers.peel_numbers);
        let config = c.cap.map_or_else(|| ProcessConfig::with_default_cap(&h), ProcessConfig::new);
        let run_seed = derive_seed(h.seed(), 0);
        let trace = match c.variant {
            Variant::Rep => run_rep(&h, &policy, run_seed, config).trace,
            Variant::RepPrime => run_rep_prime(&h, &f, &policy, run_seed, config),
            Variant::Parallel => run_parallel_insertion_sim(&h, &policy, run_seed, config).trace,
        };
        rounds_sum += trace.rounds as f64;
        bound_sum += bound as f64;
        done += trace.is_done() as u64;
        report.push(vec![
            c.variant.name().into(),
            c.policy.name().into(),
            c.n.into(),
            c.m.into(),
            c.k.into(),
            h.seed().into(),
            trial.into(),
            trace.rounds.into(),
            trace.status.name().into(),
            bound.into(),
        ]);
    }
    let trials = c.trials.max(1) as f64;
    report.aggregate("mean_rounds", rounds_sum / trials);
    report.aggregate("mean_rounds_per_edge", if c.m == 0 { 0.0 } else { rounds_sum / trials / c.m as f64 });
    report.aggregate("mean_lemma4_bound", bound_sum / trials);
    report.aggregate("done_fraction", done as f64 / trials);
    Ok(report)
}

fn thresholds(c: &ThresholdConfig) -> Result<RunReport> {
    let mut report = RunReport::new("thresholds", c, &THRESHOLD_COLUMNS);
    println!("{:>3} {:>14} {:>10} {:>7} {:>9}", "k", "lambda*", "c_delta", "3 dp", "table");
    for k in c.k_min..=c.k_max {
        let r = peeling_threshold(k)?;
        let rounded = (r.c_delta * 1000.0).round() / 1000.0;
        let reference = reference_thresholds(k, 1).ok().and_then(|p| p.peeling);
        let shown = reference.map_or_else(|| "-".to_owned(), |x| format!("{x:.3}"));
        println!("{k:>3} {:>14.10} {:>10.6} {rounded:>7.3} {shown:>9}", r.lambda_star, r.c_delta);
        report.push(vec![k.into(), r.lambda_star.into(), r.c_delta.into(), rounded.into(), shown.into()]);
    }
    Ok(report)
}

fn cont_peel(c: &ContPeelConfig) -> Result<RunReport> {
    let grid = parse_grid(&c.grid)?;
    let m = (c.c * c.n as f64).floor() as usize;
    let mut report = RunReport::new("cont-peel", c, &CONT_PEEL_COLUMNS);
    let (mut empty, mut prop6, mut vanish, mut tau_sum) = (0u64, 0u64, 0u64, 0.0);
    let mut needed_t0 = 0.0f64;
    for i in 0..c.seeds {
        let seed = derive_seed(c.seed, i);
        let traj = simulate_continuous_peeling(c.n, m, c.k, seed, &grid)?;
        for s in traj.grid_samples() {
            report.push(vec![seed.into(), s.t.into(), s.balls.into(), s.heavy.into(), s.light.into(), traj.tau.into()]);
        }
        let check = check_proposition6(&traj, c.t0, c.k);
        empty += traj.terminated_empty as u64;
        prop6 += check.passes(0.01 * c.n as f64) as u64;
        vanish += check_heavy_vanish(&traj, m) as u64;
        tau_sum += traj.tau;
        needed_t0 = needed_t0.max(check.last_violation.unwrap_or(0.0));
    }
    let runs = c.seeds.max(1) as f64;
    report.aggregate("terminated_empty_fraction", empty as f64 / runs);
    report.aggregate("mean_tau", tau_sum / runs);
    report.aggregate("prop6_pass_fraction", prop6 as f64 / runs);
    report.aggregate("heavy_vanish_fraction", vanish as f64 / runs);
    report.aggregate("last_heavy_bound_violation", needed_t0);
    Ok(report)
}

fn verify(c: &VerifyConfig) -> RunReport {
    let mut report = RunReport::new("verify", c, &["id", "name", "passed", "seconds", "detail"]);
    let verdicts = if c.quick {
        acceptance::quick_checks()
    } else {
        acceptance::CRITERIA
            .iter()
            .filter(|cr| c.criteria.is_empty() || c.criteria.contains(&cr.id))
            .map(|cr| {
                let v = (cr.run)();
                println!("{v}");
                v
            })
            .collect()
    };
    for v in &verdicts {
        if c.quick {
            println!("{v}");
        }
        report.push(vec![
            (v.id as u64).into(),
            v.name.as_str().into(),
            (if v.passed { "pass" } else { "fail" }).into(),
            v.seconds.into(),
            v.detail.as_str().into(),
        ]);
    }
    let passed = verdicts.iter().filter(|v| v.passed).count();
    report.aggregate("passed", passed as f64);
    report.aggregate("failed", (verdicts.len() - passed) as f64);
    report.verdicts = verdicts;
    println!("verdict: {}", if report.all_passed() { "PASS" } else { "FAIL" });
    report
}

/// Convenience for tests: run the CLI with a program name prepended.
pub fn run_args(args: &[&str]) -> i32 {
    run_cli(std::iter::once("rwcuckoo").chain(args.iter().copied()))
}

