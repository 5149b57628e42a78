//! End-to-end acceptance checks at their pinned sizes and tolerances.
//!
//! Every check derives its seeds from a fixed master seed, so a verdict is
//! reproducible bit for bit.

use std::time::Instant;

use rand::Rng;

use super::report::Verdict;
use crate::analysis::{
    b_star, check_heavy_vanish, check_proposition6, h_star, parse_grid, peeling_threshold, simulate_continuous_peeling,
};
use crate::cuckoo::{bulk_insert_experiment, BulkParams};
use crate::error::Result;
use crate::eviction::{run_rep_prime, Policy, PolicyKind, ProcessConfig};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::peeling::{
    brute_force_path_count, build_vertex_dependence_graph, count_paths, peeling_numbers_recursive, sample_peelable,
    two_core, vertex_peel_numbers, Peeling, DEFAULT_PATH_BUDGET,
};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::walk::Exclusion;

const MASTER: u64 = 0x5EED_2024;

fn master(id: u32) -> u64 {
    derive_seed(MASTER, id as u64)
}

fn timed(id: u32, name: &str, check: impl FnOnce() -> Result<(bool, String)>) -> Verdict {
    let start = Instant::now();
    let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Verdict { id, name: name.to_owned(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// A named acceptance check.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn() -> Verdict,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "threshold reproduction", run: threshold_reproduction },
    Criterion { id: 2, name: "peelability phase transition", run: phase_transition },
    Criterion { id: 3, name: "constant amortised insertion", run: constant_insertion },
    Criterion { id: 4, name: "failure above the load threshold", run: failure_above_threshold },
    Criterion { id: 5, name: "round bound for the target process", run: lemma4_bound },
    Criterion { id: 6, name: "path-count oracle equivalence", run: path_count_oracle },
    Criterion { id: 7, name: "path-count inequality", run: path_count_inequality },
    Criterion { id: 8, name: "trajectory match", run: trajectory_match },
    Criterion { id: 9, name: "light and heavy balls", run: light_and_heavy },
    Criterion { id: 10, name: "heavy balls vanish", run: heavy_vanish },
    Criterion { id: 11, name: "total peel linearity", run: total_peel_linearity },
];

pub fn run_all() -> Vec<Verdict> {
    CRITERIA.iter().map(|c| (c.run)()).collect()
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn threshold_reproduction() -> Verdict {
    timed(1, "threshold reproduction", || {
        let expected = [0.818, 0.772, 0.702, 0.637, 0.582];
        let start = Instant::now();
        let mut got = Vec::new();
        for k in 3..=7 {
            got.push(round3(peeling_threshold(k)?.c_delta));
        }
        let fast = start.elapsed().as_secs_f64() < 1.0;
        Ok((got == expected && fast, format!("k=3..7 -> {got:?}")))
    })
}

pub fn phase_transition() -> Verdict {
    timed(2, "peelability phase transition", || {
        let n = 100_000;
        let count = |m: usize, salt: u64| -> Result<usize> {
            let mut empty = 0;
            for i in 0..100 {
                let h = Hypergraph::sample(n, m, 3, derive_seed(master(2) ^ salt, i))?;
                empty += two_core(&h).is_empty() as usize;
            }
            Ok(empty)
        };
        let below = count(78_000, 1)?;
        let above = 100 - count(86_000, 2)?;
        Ok((below >= 99 && above >= 99, format!("empty core at 0.78n: {below}/100, non-empty at 0.86n: {above}/100")))
    })
}

pub fn constant_insertion() -> Verdict {
    timed(3, "constant amortised insertion", || {
        let run = |n: usize| {
            bulk_insert_experiment(&BulkParams {
                n,
                k: 3,
                load: 0.75,
                seed: master(3),
                exclusion: Exclusion::AllCopies,
                trials: 20,
                move_cap: None,
            })
        };
        let small = run(10_000)?;
        let large = run(1_000_000)?;
        let ratio = small.mean_moves.max(large.mean_moves) / small.mean_moves.min(large.mean_moves);
        let failures = small.failure_rate + large.failure_rate;
        Ok((
            ratio <= 1.2 && failures == 0.0,
            format!(
                "mean moves/key {:.4} (n=1e4) vs {:.4} (n=1e6), ratio {ratio:.4}, failure rates {}/{}",
                small.mean_moves, large.mean_moves, small.failure_rate, large.failure_rate
            ),
        ))
    })
}

pub fn failure_above_threshold() -> Verdict {
    timed(4, "failure above the load threshold", || {
        let summary = bulk_insert_experiment(&BulkParams {
            n: 10_000,
            k: 3,
            load: 0.95,
            seed: master(4),
            exclusion: Exclusion::AllCopies,
            trials: 100,
            move_cap: None,
        })?;
        let failed = summary.trials.iter().filter(|t| t.failures > 0).count();
        Ok((failed >= 95, format!("{failed}/100 trials hit the move cap")))
    })
}

pub fn lemma4_bound() -> Verdict {
    timed(5, "round bound for the target process", || {
        let (n, m, k) = (1000, 750, 3);
        let mut worst = 0.0f64;
        let mut violations = 0;
        for i in 0..100 {
            let (h, f, _) = sample_peelable(n, m, k, derive_seed(master(5), i), 1000)?;
            let report = peeling_numbers_recursive(&h, &f);
            let bound = (k * m) as f64 + k as f64 * report.total_peel as f64;
            let config = ProcessConfig::with_default_cap(&h);
            for kind in PolicyKind::ALL {
                let policy = Policy::with_priorities(kind, report.peel_numbers.clone());
                let mut rounds = 0u64;
                for run in 0..50 {
                    let trace = run_rep_prime(&h, &f, &policy, derive_seed(h.seed(), run), config);
                    rounds += trace.rounds;
                }
                let ratio = rounds as f64 / 50.0 / bound;
                worst = worst.max(ratio);
                violations += (ratio > 1.05) as usize;
            }
        }
        Ok((violations == 0, format!("worst mean rounds / k(m + total peel) = {worst:.4} over 500 cells, {violations} above 1.05")))
    })
}

/// The small peelable instances shared by the path-count checks.
pub fn small_instances(count: usize, seed: u64) -> Result<Vec<(Hypergraph, Peeling)>> {
    let mut rng = stream_rng(seed, Stream::Hypergraph);
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let k = rng.random_range(2..=4);
        let n = rng.random_range(4..=30);
        let m = rng.random_range(0..=20.min(n * 4 / 5));
        let (h, f, _) = sample_peelable(n, m, k, derive_seed(seed, i), 100_000)?;
        out.push((h, f));
    }
    Ok(out)
}

fn oracle_agreement(instances: &[(Hypergraph, Peeling)]) -> Result<(usize, usize)> {
    let mut path_mismatch = 0;
    let mut peel_mismatch = 0;
    for (h, f) in instances {
        let g = build_vertex_dependence_graph(h, f);
        for v in 0..h.n() as Vertex {
            let (fast, overflow) = count_paths(h, f, v);
            let slow = brute_force_path_count(&g, v, DEFAULT_PATH_BUDGET)?;
            path_mismatch += (overflow || fast as u128 != slow) as usize;
        }
        let report = peeling_numbers_recursive(h, f);
        let (by_vertex, _) = vertex_peel_numbers(&g)?;
        peel_mismatch +=
            (0..h.m()).filter(|&e| report.peel_numbers[e] != by_vertex[f.target(e) as usize]).count();
    }
    Ok((path_mismatch, peel_mismatch))
}

fn inequality_violations(instances: &[(Hypergraph, Peeling)]) -> usize {
    instances
        .iter()
        .filter(|(h, f)| {
            let total_peel = peeling_numbers_recursive(h, f).total_peel;
            let total_paths: u64 = (0..h.n() as Vertex).map(|v| count_paths(h, f, v).0).sum();
            total_peel > total_paths - h.n() as u64
        })
        .count()
}

pub fn path_count_oracle() -> Verdict {
    timed(6, "path-count oracle equivalence", || {
        let instances = small_instances(200, master(6))?;
        let (paths, peels) = oracle_agreement(&instances)?;
        Ok((paths == 0 && peels == 0, format!("200 instances: {paths} path-count mismatches, {peels} peel-number mismatches")))
    })
}

pub fn path_count_inequality() -> Verdict {
    timed(7, "path-count inequality", || {
        let instances = small_instances(200, master(6))?;
        let bad = inequality_violations(&instances);
        Ok((bad == 0, format!("total peel <= total paths - n violated on {bad}/200 instances")))
    })
}

pub fn trajectory_match() -> Verdict {
    timed(8, "trajectory match", || {
        let (n, c, k) = (100_000usize, 0.7, 3);
        let grid = parse_grid("0:0.01:4")?;
        let traj = simulate_continuous_peeling(n, (c * n as f64) as usize, k, master(8), &grid)?;
        let (mut sup_b, mut sup_h) = (0.0f64, 0.0f64);
        for s in traj.grid_samples() {
            let p = (-s.t).exp();
            sup_b = sup_b.max((s.balls as f64 / n as f64 - b_star(p, c, k)?).abs());
            sup_h = sup_h.max((s.heavy as f64 / n as f64 - h_star(p, c, k)?).abs());
        }
        Ok((sup_b <= 0.01 && sup_h <= 0.01, format!("sup |B/n - B*| = {sup_b:.5}, sup |H/n - H*| = {sup_h:.5}")))
    })
}

fn regime_trajectories(id: u32) -> Result<Vec<crate::analysis::PeelTrajectory>> {
    let (n, m, k) = (100_000, 70_000, 3);
    let grid = parse_grid("0:0.05:20")?;
    (0..100).map(|i| simulate_continuous_peeling(n, m, k, derive_seed(master(id), i), &grid)).collect()
}

pub fn light_and_heavy() -> Verdict {
    timed(9, "light and heavy balls", || {
        let (n, k, t0) = (100_000.0, 3, 3.0);
        let trajectories = regime_trajectories(9)?;
        let checks: Vec<_> = trajectories.iter().map(|t| check_proposition6(t, t0, k)).collect();
        let reached = checks.iter().filter(|c| c.reached_t0).count();
        let light = checks.iter().filter(|c| c.min_light.is_none_or(|l| l as f64 >= 0.01 * n)).count();
        let bounded = checks.iter().filter(|c| c.heavy_bounded).count();
        let passed = checks.iter().filter(|c| c.passes(0.01 * n)).count();
        let mut needed: Vec<f64> = checks.iter().map(|c| c.last_violation.unwrap_or(0.0)).collect();
        needed.sort_by(f64::total_cmp);
        Ok((
            passed >= 99,
            format!(
                "t0=3: {passed}/100 pass (tau >= t0: {reached}, min L >= 0.01n: {light}, H <= B/2k: {bounded}); \
                 last violation of H <= B/2k is before t={:.3} in 99/100 seeds",
                needed[98]
            ),
        ))
    })
}

pub fn heavy_vanish() -> Verdict {
    timed(10, "heavy balls vanish", || {
        let trajectories = regime_trajectories(10)?;
        let ok = trajectories.iter().filter(|t| check_heavy_vanish(t, t.m)).count();
        let mut last_heavy: Vec<f64> = trajectories
            .iter()
            .map(|t| t.samples.iter().filter(|s| s.heavy > 0).map(|s| s.t).next_back().unwrap_or(0.0))
            .collect();
        last_heavy.sort_by(f64::total_cmp);
        Ok((
            ok >= 95,
            format!(
                "H = 0 after (3/5)ln(m) = {:.3} in {ok}/100 seeds; 95/100 seeds have no heavy ball after t={:.3}",
                crate::analysis::heavy_vanish_cutoff(70_000),
                last_heavy[94]
            ),
        ))
    })
}

pub fn total_peel_linearity() -> Verdict {
    timed(11, "total peel linearity", || {
        let mean = |n: usize| -> Result<f64> {
            let mut sum = 0.0;
            for i in 0..20 {
                let (h, f, _) = sample_peelable(n, n * 3 / 4, 3, derive_seed(master(11) ^ n as u64, i), 1000)?;
                sum += peeling_numbers_recursive(&h, &f).total_peel as f64 / n as f64;
            }
            Ok(sum / 20.0)
        };
        let (small, large) = (mean(10_000)?, mean(100_000)?);
        let ratio = small.max(large) / small.min(large);
        Ok((ratio <= 1.3, format!("mean total peel / n: {small:.4} (n=1e4) vs {large:.4} (n=1e5), ratio {ratio:.4}")))
    })
}

/// Small-instance oracle suites: path counts against enumeration, the
/// path-count inequality, and the round bound on small hypergraphs.
pub fn quick_checks() -> Vec<Verdict> {
    vec![
        timed(101, "path counts vs enumeration (quick)", || {
            let (paths, peels) = oracle_agreement(&small_instances(50, master(100))?)?;
            Ok((paths == 0 && peels == 0, format!("50 instances: {paths} path-count mismatches, {peels} peel-number mismatches")))
        }),
        timed(102, "path-count inequality (quick)", || {
            let bad = inequality_violations(&small_instances(50, master(100))?);
            Ok((bad == 0, format!("violated on {bad}/50 instances")))
        }),
        timed(103, "round bound (quick)", || {
            let mut worst = 0.0f64;
            // max-peel meets the bound with equality, so the mean needs many runs
            const RUNS: u64 = 2000;
            for i in 0..5 {
                let (h, f, _) = sample_peelable(100, 75, 3, derive_seed(master(103), i), 1000)?;
                let report = peeling_numbers_recursive(&h, &f);
                let bound = 3.0 * (75 + report.total_peel) as f64;
                for kind in PolicyKind::ALL {
                    let policy = Policy::with_priorities(kind, report.peel_numbers.clone());
                    let config = ProcessConfig::with_default_cap(&h);
                    let rounds: u64 = (0..RUNS).map(|r| run_rep_prime(&h, &f, &policy, derive_seed(h.seed(), r), config).rounds).sum();
                    worst = worst.max(rounds as f64 / RUNS as f64 / bound);
                }
            }
            Ok((worst <= 1.05, format!("worst mean rounds / bound = {worst:.4}")))
        }),
    ]
}
