use rwcuckoo::analysis::{
    b_star, h_star, peeling_threshold, reference_thresholds, simulate_continuous_peeling, simulate_extended,
    simulate_pure_death,
};
use rwcuckoo::peeling::peel;
use rwcuckoo::rng::derive_seed;

fn grid(step: f64, end: f64) -> Vec<f64> {
    (0..=(end / step).round() as usize).map(|i| i as f64 * step).collect()
}

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn pure_death_mean_decays_exponentially() {
    let (m, k) = (10_000, 3);
    let counts: Vec<f64> =
        (0..200).map(|s| simulate_pure_death(m, k, derive_seed(1, s), &[1.0]).unwrap()[0].1 as f64).collect();
    let expected = ((k - 1) * m) as f64 * (-(k as f64) / (k - 1) as f64).exp();
    let (mean, _) = mean_and_sd(&counts);
    assert!((mean / expected - 1.0).abs() < 0.02, "{mean} vs {expected}");
}

#[test]
fn pure_death_is_monotone_and_starts_full() {
    let g = grid(0.25, 5.0);
    let run = simulate_pure_death(500, 4, 9, &g).unwrap();
    assert_eq!(run[0].1, 1500);
    assert!(run.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn extended_balls_track_the_scaled_death_process() {
    let (n, m, k) = (3000, 2000, 3);
    let g = grid(0.5, 6.0);
    let seeds = 200;
    let mut diffs = vec![Vec::with_capacity(seeds); g.len()];
    for s in 0..seeds as u64 {
        let ext = simulate_extended(n, m, k, derive_seed(2, s), &g).unwrap();
        let death = simulate_pure_death(m, k, derive_seed(3, s), &g).unwrap();
        for (i, (e, d)) in ext.iter().zip(&death).enumerate() {
            diffs[i].push(e.balls as f64 - k as f64 / (k - 1) as f64 * d.1 as f64);
        }
    }
    for (i, d) in diffs.iter().enumerate() {
        let (mean, sd) = mean_and_sd(d);
        let slack = 1.0 + 4.0 * sd / (seeds as f64).sqrt();
        assert!(mean.abs() <= slack, "t = {}: mean gap {mean} > {slack}", g[i]);
    }
}

#[test]
fn extended_processes_share_the_initial_state() {
    let g = grid(0.1, 3.0);
    for s in 0..10 {
        let traj = simulate_continuous_peeling(2000, 1400, 3, s, &g).unwrap();
        let ext = simulate_extended(2000, 1400, 3, s, &g).unwrap();
        let first = traj.grid_samples().next().unwrap();
        assert_eq!((ext[0].balls, ext[0].heavy), (first.balls, first.heavy));
        assert!(ext.windows(2).all(|w| w[0].balls >= w[1].balls && w[0].heavy >= w[1].heavy));
    }
}

#[test]
fn mean_field_curves_match_simulation() {
    let (n, c, k) = (20_000, 0.7, 3);
    let m = (c * n as f64) as usize;
    let g = grid(0.25, 3.0);
    let seeds = 10;
    let mut balls = vec![0.0; g.len()];
    let mut heavy = vec![0.0; g.len()];
    for s in 0..seeds {
        let traj = simulate_continuous_peeling(n, m, k, derive_seed(4, s), &g).unwrap();
        for (i, sample) in traj.grid_samples().enumerate() {
            balls[i] += sample.balls as f64 / (n * seeds as usize) as f64;
            heavy[i] += sample.heavy as f64 / (n * seeds as usize) as f64;
        }
    }
    for (i, &t) in g.iter().enumerate() {
        let p = (-t).exp();
        let (b, h) = (b_star(p, c, k).unwrap(), h_star(p, c, k).unwrap());
        assert!((balls[i] - b).abs() < 0.02, "B at t = {t}: {} vs {b}", balls[i]);
        assert!((heavy[i] - h).abs() < 0.02, "H at t = {t}: {} vs {h}", heavy[i]);
    }
}

#[test]
fn trajectory_invariants_and_emitted_peeling() {
    for s in 0..20 {
        let traj = simulate_continuous_peeling(500, 350, 3, s, &grid(0.2, 8.0)).unwrap();
        assert!(traj.samples.iter().all(|x| x.light + x.heavy == x.balls));
        assert!(traj.samples.windows(2).all(|w| w[0].t <= w[1].t && w[0].balls >= w[1].balls));
        if traj.terminated_empty {
            assert_eq!(traj.rounds(), 350);
        }
        let round_starts: Vec<u64> = traj.samples.iter().filter(|x| !x.on_grid && x.t < traj.tau).map(|x| x.balls).collect();
        for (r, &b) in round_starts.iter().enumerate() {
            assert_eq!(b, 3 * (350 - r as u64), "round {r}");
        }
        let (h, f) = traj.emitted_peeling().unwrap();
        assert_eq!(h.m(), traj.rounds());
        // the emitted edges peel completely on their own
        assert!(peel(&h, 0, false).into_peeling().is_some());
        for e in 0..h.m() {
            assert!(h.edge(e).contains(&f.target(e)));
        }
    }
}

#[test]
fn below_threshold_runs_empty_and_above_gets_stuck() {
    let g = grid(1.0, 4.0);
    let empty = (0..20).filter(|&s| simulate_continuous_peeling(20_000, 14_000, 3, s, &g).unwrap().terminated_empty).count();
    let stuck = (0..20).filter(|&s| !simulate_continuous_peeling(20_000, 18_000, 3, s, &g).unwrap().terminated_empty).count();
    assert_eq!((empty, stuck), (20, 20));
}

fn brute_threshold(k: usize) -> f64 {
    let points = 2_000_000;
    (1..=points)
        .map(|i| {
            let lambda = i as f64 * 20.0 / points as f64;
            lambda / (k as f64 * (1.0 - (-lambda).exp()).powi(k as i32 - 1))
        })
        .fold(f64::MAX, f64::min)
}

#[test]
fn thresholds_match_a_brute_force_scan() {
    for k in 3..=9 {
        let t = peeling_threshold(k).unwrap();
        assert!((t.c_delta - brute_threshold(k)).abs() < 1e-8, "k = {k}");
        assert!(t.c_delta < 1.0);
    }
}

#[test]
fn thresholds_reproduce_the_reference_table() {
    for k in 3..=7 {
        let t = peeling_threshold(k).unwrap();
        let reference = reference_thresholds(k, 1).unwrap().peeling.unwrap();
        assert_eq!(format!("{:.3}", t.c_delta), format!("{reference:.3}"));
    }
    assert!(reference_thresholds(2, 1).unwrap().peeling.is_none());
    assert!(reference_thresholds(8, 1).is_err());
}
