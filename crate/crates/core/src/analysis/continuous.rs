//! Peeling of the configuration model embedded in continuous time.
//!
//! `k·m` balls are placed on uniform vertices and given i.i.d. `Exp(1)`
//! lifetimes. Each round removes a uniformly random light ball at the
//! current time and then waits for the next `k-1` deaths; the `k` balls
//! form one hyperedge oriented to the light ball's vertex. The process stops
//! at `τ` when no light ball remains.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::peeling::Peeling;
use crate::rng::{stream_rng, Stream};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelSample {
    pub t: f64,
    pub balls: u64,
    pub heavy: u64,
    pub light: u64,
    /// Grid samples are left limits at `t`. Other samples hold the state at
    /// the start of a round, or the final state at `τ`.
    pub on_grid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelTrajectory {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    /// Sorted by time; `balls` is non-increasing.
    pub samples: Vec<PeelSample>,
    pub tau: f64,
    pub terminated_empty: bool,
    /// Incidences of the emitted hyperedges, `k` per round, the light ball's
    /// vertex first.
    pub emitted: Vec<Vertex>,
}

impl PeelTrajectory {
    pub fn rounds(&self) -> usize {
        self.emitted.len() / self.k
    }

    pub fn grid_samples(&self) -> impl Iterator<Item = &PeelSample> {
        self.samples.iter().filter(|s| s.on_grid)
    }

    /// The emitted hyperedges with each one oriented to its light ball's
    /// vertex, peeled in round order.
    pub fn emitted_peeling(&self) -> Result<(Hypergraph, Peeling)> {
        let h = Hypergraph::from_explicit(self.n, self.k, self.emitted.chunks_exact(self.k))?;
        let targets = self.emitted.chunks_exact(self.k).map(|e| e[0]).collect();
        let order = (0..self.rounds() as u32).collect();
        let f = Peeling::from_parts(&h, targets, order)?;
        Ok((h, f))
    }
}

/// Parses `start:step:end` into the inclusive grid `start, start+step, ...`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, step, end] = parts[..] else {
        return Err(Error::invalid(format!("grid `{spec}` is not start:step:end")));
    };
    let parse = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("grid `{spec}` has a bad number `{s}`")))
    };
    let (start, step, end) = (parse(start)?, parse(step)?, parse(end)?);
    if !(start >= 0.0 && step > 0.0 && end >= start && end.is_finite()) {
        return Err(Error::invalid(format!("grid `{spec}` needs 0 <= start <= end and step > 0")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("sample grid must be finite, non-negative and sorted"));
    }
    Ok(())
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > NONE as usize {
        return Err(Error::invalid(format!("n = {n} is out of range")));
    }
    if k < 2 {
        return Err(Error::invalid(format!("k = {k} must be at least 2")));
    }
    Ok(())
}

/// Ball vertices, lifetimes and the ball ids sorted by lifetime.
fn place_balls(n: usize, balls: usize, seed: u64) -> (Vec<Vertex>, Vec<f64>, Vec<u32>) {
    let mut place = stream_rng(seed, Stream::BallPlacement);
    let vertex: Vec<Vertex> = (0..balls).map(|_| place.random_range(0..n as u32)).collect();
    let mut clock = stream_rng(seed, Stream::Lifetimes);
    let lifetime: Vec<f64> = (0..balls).map(|_| clock.sample(Exp1)).collect();
    let mut order: Vec<u32> = (0..balls as u32).collect();
    order.sort_unstable_by(|&a, &b| lifetime[a as usize].total_cmp(&lifetime[b as usize]));
    (vertex, lifetime, order)
}

fn heavy_share(count: u32) -> u64 {
    if count >= 2 {
        count as u64
    } else {
        0
    }
}

/// Surviving balls per vertex with the light-vertex pool.
struct Urn {
    count: Vec<u32>,
    /// XOR of surviving ball ids per vertex; the ball itself when light.
    xor: Vec<u32>,
    pool: Vec<Vertex>,
    slot: Vec<u32>,
    alive: Vec<bool>,
    balls: u64,
    heavy: u64,
}

impl Urn {
    fn new(n: usize, vertex: &[Vertex]) -> Self {
        let mut urn = Urn {
            count: vec![0; n],
            xor: vec![0; n],
            pool: Vec::new(),
            slot: vec![NONE; n],
            alive: vec![true; vertex.len()],
            balls: vertex.len() as u64,
            heavy: 0,
        };
        for (b, &v) in vertex.iter().enumerate() {
            urn.count[v as usize] += 1;
            urn.xor[v as usize] ^= b as u32;
        }
        for v in 0..n {
            urn.heavy += heavy_share(urn.count[v]);
            if urn.count[v] == 1 {
                urn.slot[v] = urn.pool.len() as u32;
                urn.pool.push(v as Vertex);
            }
        }
        urn
    }

    fn remove(&mut self, ball: u32, v: Vertex) {
        debug_assert!(self.alive[ball as usize]);
        let vi = v as usize;
        let before = self.count[vi];
        self.heavy -= heavy_share(before);
        self.heavy += heavy_share(before - 1);
        self.count[vi] = before - 1;
        self.xor[vi] ^= ball;
        self.alive[ball as usize] = false;
        self.balls -= 1;
        if before == 1 {
            let at = self.slot[vi] as usize;
            let last = self.pool.pop().expect("light vertex is pooled");
            if last != v {
                self.pool[at] = last;
                self.slot[last as usize] = at as u32;
            }
            self.slot[vi] = NONE;
        } else if before == 2 {
            self.slot[vi] = self.pool.len() as u32;
            self.pool.push(v);
        }
    }

    fn sample(&self, t: f64, on_grid: bool) -> PeelSample {
        PeelSample { t, balls: self.balls, heavy: self.heavy, light: self.balls - self.heavy, on_grid }
    }
}

/// Runs the continuous-time peeling process, sampling `(B, H, L)` at every
/// grid time and at the start of every round. Grid times past an empty
/// termination record zeros; grid times past a stuck `τ` are not recorded.
pub fn simulate_continuous_peeling(n: usize, m: usize, k: usize, seed: u64, grid: &[f64]) -> Result<PeelTrajectory> {
    check_shape(n, k)?;
    check_grid(grid)?;
    let total = k.checked_mul(m).filter(|&b| b < NONE as usize).ok_or_else(|| Error::invalid("too many balls"))?;
    let (vertex, lifetime, order) = place_balls(n, total, seed);
    let mut urn = Urn::new(n, &vertex);
    let mut choose = stream_rng(seed, Stream::LightChoice);

    let mut samples = Vec::with_capacity(m + grid.len() + 1);
    let mut emitted = Vec::with_capacity(total);
    let mut next_grid = 0;
    let mut cursor = 0;
    let mut now = 0.0;

    let flush = |upto: f64, urn: &Urn, next_grid: &mut usize, samples: &mut Vec<PeelSample>| {
        while *next_grid < grid.len() && grid[*next_grid] <= upto {
            samples.push(urn.sample(grid[*next_grid], true));
            *next_grid += 1;
        }
    };

    let terminated_empty = loop {
        flush(now, &urn, &mut next_grid, &mut samples);
        if urn.balls == 0 {
            break true;
        }
        if urn.pool.is_empty() {
            break false;
        }
        samples.push(urn.sample(now, false));

        let v = urn.pool[choose.random_range(0..urn.pool.len())];
        let light = urn.xor[v as usize];
        urn.remove(light, v);
        emitted.push(v);
        for _ in 1..k {
            while !urn.alive[order[cursor] as usize] {
                cursor += 1;
            }
            let ball = order[cursor];
            let t = lifetime[ball as usize];
            flush(t, &urn, &mut next_grid, &mut samples);
            urn.remove(ball, vertex[ball as usize]);
            emitted.push(vertex[ball as usize]);
            now = t;
        }
    };
    samples.push(urn.sample(now, false));
    if terminated_empty {
        flush(f64::INFINITY, &urn, &mut next_grid, &mut samples);
    }
    Ok(PeelTrajectory { n, m, k, seed, samples, tau: now, terminated_empty, emitted })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSample {
    pub t: f64,
    /// `B'(t)`: uniform removals plus deaths, no reference to vertices.
    pub balls: u64,
    /// `H'(t)`: balls whose lifetime exceeds `t` and which share their
    /// vertex with another such ball.
    pub heavy: u64,
}

/// The extended processes `B'` and `H'`, which stay defined after `τ`. Both
/// use the placement and lifetimes of the same seed as
/// [`simulate_continuous_peeling`]. Grid samples are left limits.
pub fn simulate_extended(n: usize, m: usize, k: usize, seed: u64, grid: &[f64]) -> Result<Vec<ExtendedSample>> {
    check_shape(n, k)?;
    check_grid(grid)?;
    let total = k.checked_mul(m).filter(|&b| b < NONE as usize).ok_or_else(|| Error::invalid("too many balls"))?;
    let (vertex, lifetime, order) = place_balls(n, total, seed);

    let mut heavy_at = Vec::with_capacity(grid.len());
    let mut count = vec![0u32; n];
    for &v in &vertex {
        count[v as usize] += 1;
    }
    let mut heavy: u64 = count.iter().map(|&c| heavy_share(c)).sum();
    let mut dead = 0;
    for &t in grid {
        while dead < total && lifetime[order[dead] as usize] < t {
            let v = vertex[order[dead] as usize] as usize;
            heavy = heavy - heavy_share(count[v]) + heavy_share(count[v] - 1);
            count[v] -= 1;
            dead += 1;
        }
        heavy_at.push(heavy);
    }

    let mut balls_at = Vec::with_capacity(grid.len());
    let mut alive: Vec<u32> = (0..total as u32).collect();
    let mut slot: Vec<u32> = (0..total as u32).collect();
    let mut choose = stream_rng(seed, Stream::LightChoice);
    let mut cursor = 0;
    let remove = |ball: u32, alive: &mut Vec<u32>, slot: &mut Vec<u32>| {
        let at = slot[ball as usize] as usize;
        let last = alive.pop().expect("ball is alive");
        if last != ball {
            alive[at] = last;
            slot[last as usize] = at as u32;
        }
        slot[ball as usize] = NONE;
    };
    let mut next_grid = 0;
    let mut now = 0.0;
    while !alive.is_empty() {
        while next_grid < grid.len() && grid[next_grid] <= now {
            balls_at.push(alive.len() as u64);
            next_grid += 1;
        }
        let ball = alive[choose.random_range(0..alive.len())];
        remove(ball, &mut alive, &mut slot);
        for _ in 1..k {
            while slot[order[cursor] as usize] == NONE {
                cursor += 1;
            }
            let ball = order[cursor];
            let t = lifetime[ball as usize];
            while next_grid < grid.len() && grid[next_grid] <= t {
                balls_at.push(alive.len() as u64);
                next_grid += 1;
            }
            remove(ball, &mut alive, &mut slot);
            now = t;
        }
    }
    balls_at.resize(grid.len(), 0);

    Ok(grid
        .iter()
        .zip(balls_at.into_iter().zip(heavy_at))
        .map(|(&t, (balls, heavy))| ExtendedSample { t, balls, heavy })
        .collect())
}

/// Pure death process with `(k-1)·m` elements and rate `k/(k-1)`, counted
/// at the grid times.
pub fn simulate_pure_death(m: usize, k: usize, seed: u64, grid: &[f64]) -> Result<Vec<(f64, u64)>> {
    if k < 2 {
        return Err(Error::invalid(format!("k = {k} must be at least 2")));
    }
    check_grid(grid)?;
    let rate = k as f64 / (k - 1) as f64;
    let mut rng = stream_rng(seed, Stream::DeathProcess);
    let mut deaths: Vec<f64> = (0..(k - 1) * m).map(|_| rng.sample::<f64, _>(Exp1) / rate).collect();
    deaths.sort_unstable_by(f64::total_cmp);
    Ok(grid
        .iter()
        .map(|&t| (t, (deaths.len() - deaths.partition_point(|&d| d <= t)) as u64))
        .collect())
}

/// Light-ball supply before `t0` and heavy-ball scarcity after it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop6Check {
    pub t0: f64,
    pub tau: f64,
    /// `τ >= t0`, or nothing to peel.
    pub reached_t0: bool,
    /// Minimum of `L` over samples with `t <= t0`; `None` without balls.
    pub min_light: Option<u64>,
    /// `2k·H <= B` at every sample in `[t0, τ]`.
    pub heavy_bounded: bool,
    /// Largest `H/B` over samples in `[t0, τ]` with `B > 0`.
    pub max_heavy_ratio: f64,
    /// Latest sample time anywhere in `[0, τ]` with `2k·H > B`.
    pub last_violation: Option<f64>,
}

impl Prop6Check {
    pub fn passes(&self, min_light: f64) -> bool {
        self.reached_t0 && self.heavy_bounded && self.min_light.is_none_or(|l| l as f64 >= min_light)
    }
}

pub fn check_proposition6(traj: &PeelTrajectory, t0: f64, k: usize) -> Prop6Check {
    let k = k as u64;
    let within = |s: &&PeelSample| s.t <= traj.tau;
    let violates = |s: &PeelSample| 2 * k * s.heavy > s.balls;
    let late = || traj.samples.iter().filter(within).filter(|s| s.t >= t0);
    Prop6Check {
        t0,
        tau: traj.tau,
        reached_t0: traj.m == 0 || traj.tau >= t0,
        min_light: (traj.m > 0)
            .then(|| traj.samples.iter().filter(|s| s.t <= t0).map(|s| s.light).min())
            .flatten(),
        heavy_bounded: !late().any(violates),
        max_heavy_ratio: late()
            .filter(|s| s.balls > 0)
            .map(|s| s.heavy as f64 / s.balls as f64)
            .fold(0.0, f64::max),
        last_violation: traj.samples.iter().filter(within).filter(|s| violates(s)).map(|s| s.t).next_back(),
    }
}

/// `(3/5)·ln(m)`, after which no heavy ball should survive.
pub fn heavy_vanish_cutoff(m: usize) -> f64 {
    0.6 * (m.max(1) as f64).ln()
}

/// True iff `H = 0` at every sample with `t >= (3/5)·ln(m)`.
pub fn check_heavy_vanish(traj: &PeelTrajectory, m: usize) -> bool {
    if m == 0 {
        return true;
    }
    let cutoff = heavy_vanish_cutoff(m);
    traj.samples.iter().filter(|s| s.t >= cutoff).all(|s| s.heavy == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        parse_grid("0:0.25:8").unwrap()
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:0.5:2").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("0:0.05:6").unwrap().len(), 121);
        assert!(parse_grid("0:0:1").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:1").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn empty_instance() {
        let traj = simulate_continuous_peeling(10, 0, 3, 1, &grid()).unwrap();
        assert_eq!(traj.tau, 0.0);
        assert!(traj.terminated_empty);
        assert!(traj.samples.iter().all(|s| s.balls == 0));
        assert_eq!(traj.grid_samples().count(), grid().len());
        let check = check_proposition6(&traj, 3.0, 3);
        assert!(check.passes(1.0));
        assert!(check_heavy_vanish(&traj, 0));
    }

    #[test]
    fn sample_invariants() {
        let traj = simulate_continuous_peeling(2000, 1400, 3, 5, &grid()).unwrap();
        let first = traj.samples[0];
        assert_eq!((first.t, first.balls), (0.0, 4200));
        assert!(traj.samples.windows(2).all(|w| w[0].t <= w[1].t && w[0].balls >= w[1].balls));
        assert!(traj.samples.iter().all(|s| s.light + s.heavy == s.balls));
        assert_eq!(traj.rounds(), traj.samples.iter().filter(|s| !s.on_grid).count() - 1);
        if traj.terminated_empty {
            assert_eq!(traj.rounds(), 1400);
        }
    }

    #[test]
    fn emitted_edges_form_a_peeling() {
        for seed in 0..5 {
            let traj = simulate_continuous_peeling(300, 280, 3, seed, &[]).unwrap();
            let (h, f) = traj.emitted_peeling().unwrap();
            assert_eq!(h.m(), traj.rounds());
            assert_eq!(f.m(), traj.rounds());
        }
    }

    #[test]
    fn stuck_run_keeps_heavy_balls() {
        // far above the threshold the process halts with balls left, all heavy
        let traj = simulate_continuous_peeling(1000, 1000, 3, 3, &grid()).unwrap();
        assert!(!traj.terminated_empty);
        let last = traj.samples.last().unwrap();
        assert!(last.balls > 0);
        assert_eq!(last.light, 0);
        assert_eq!(last.t, traj.tau);
    }

    #[test]
    fn deterministic() {
        let a = simulate_continuous_peeling(500, 350, 3, 11, &grid()).unwrap();
        let b = simulate_continuous_peeling(500, 350, 3, 11, &grid()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extended_matches_peeling_before_tau() {
        // H' only depends on placement and lifetimes, so it equals H up to τ
        let g = grid();
        let traj = simulate_continuous_peeling(1000, 700, 3, 8, &g).unwrap();
        let ext = simulate_extended(1000, 700, 3, 8, &g).unwrap();
        for (s, e) in traj.grid_samples().zip(&ext) {
            assert_eq!(s.t, e.t);
            if s.t <= traj.tau {
                assert_eq!(s.heavy, e.heavy, "t = {}", s.t);
            }
        }
        assert_eq!(ext[0].balls, 2100);
        assert!(ext.windows(2).all(|w| w[0].balls >= w[1].balls));
    }

    #[test]
    fn pure_death_counts() {
        let d = simulate_pure_death(100, 3, 2, &[0.0, 1.0, 100.0]).unwrap();
        assert_eq!(d[0], (0.0, 200));
        assert!(d[1].1 < 200);
        assert_eq!(d[2].1, 0);
        assert!(simulate_pure_death(0, 3, 2, &[0.0]).unwrap().iter().all(|&(_, p)| p == 0));
    }

    #[test]
    fn heavy_vanish_contract() {
        let sample = |t, balls, heavy| PeelSample { t, balls, heavy, light: balls - heavy, on_grid: true };
        let mut traj = PeelTrajectory {
            n: 10,
            m: 100,
            k: 3,
            seed: 0,
            samples: vec![sample(0.0, 300, 200), sample(2.0, 10, 2), sample(3.0, 4, 0)],
            tau: 3.0,
            terminated_empty: false,
            emitted: Vec::new(),
        };
        // cutoff 0.6·ln(100) ≈ 2.76
        assert!(check_heavy_vanish(&traj, 100));
        traj.samples.push(sample(3.5, 3, 2));
        assert!(!check_heavy_vanish(&traj, 100));
    }

    #[test]
    fn proposition6_flags() {
        let sample = |t, balls, heavy| PeelSample { t, balls, heavy, light: balls - heavy, on_grid: true };
        let traj = PeelTrajectory {
            n: 10,
            m: 100,
            k: 3,
            seed: 0,
            samples: vec![sample(0.0, 300, 100), sample(2.0, 60, 20), sample(3.0, 60, 10), sample(4.0, 12, 1)],
            tau: 4.0,
            terminated_empty: true,
            emitted: Vec::new(),
        };
        let c = check_proposition6(&traj, 3.0, 3);
        assert!(c.reached_t0);
        assert_eq!(c.min_light, Some(40));
        assert!(c.heavy_bounded);
        assert_eq!(c.last_violation, Some(2.0));
        assert!((c.max_heavy_ratio - 1.0 / 6.0).abs() < 1e-12);
        let c = check_proposition6(&traj, 2.0, 3);
        assert!(!c.heavy_bounded);
        assert!(!check_proposition6(&traj, 5.0, 3).reached_t0);
    }
}
