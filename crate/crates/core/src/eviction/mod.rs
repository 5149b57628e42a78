//! The random eviction process (REP) and its target-orientation variant.
//!
//! REP keeps a partial orientation of a hypergraph. Each round a policy
//! picks an unoriented edge, which is oriented to a uniformly random
//! incidence, evicting whichever edge held that vertex. The variant REP'
//! runs until a given orientation `F` is reached exactly, and its policy may
//! pick any edge `e` with `f(e) != F(e)`.
//!
//! The `j`-th move of edge `e` uses the counter draw `(seed, e, j)`, so
//! different policies see the same randomness per edge and sequential REP
//! reproduces the cuckoo table's random walk bit for bit.

mod policy;

use serde::{Deserialize, Serialize};

use crate::hypergraph::{Hypergraph, Vertex};
use crate::peeling::{PartialOrientation, Peeling};
use crate::rng::{derive_seed, ChoiceStream};
use crate::walk::{pick_bucket, Exclusion};

pub use policy::{Policy, PolicyKind};

const NONE: u32 = u32::MAX;

/// Default round cap, `200·k·m`.
pub fn default_cap(h: &Hypergraph) -> u64 {
    (200 * h.k() as u64 * h.m() as u64).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Done,
    CapExceeded,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Done => "done",
            Termination::CapExceeded => "cap-exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    /// Total rounds; equals the sum of `moves`.
    pub rounds: u64,
    /// Times each edge was selected.
    pub moves: Vec<u64>,
    pub status: Termination,
}

impl MoveTrace {
    pub fn is_done(&self) -> bool {
        self.status == Termination::Done
    }
}

/// Knobs shared by the processes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProcessConfig {
    pub cap: u64,
    /// `i_old`-style exclusion; the processes as defined use [`Exclusion::Off`].
    pub exclusion: Exclusion,
}

impl ProcessConfig {
    pub fn new(cap: u64) -> Self {
        ProcessConfig { cap, exclusion: Exclusion::Off }
    }

    pub fn with_default_cap(h: &Hypergraph) -> Self {
        Self::new(default_cap(h))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepRun {
    pub trace: MoveTrace,
    pub orientation: PartialOrientation,
}

/// Orientation state plus the bookkeeping one round needs.
struct State<'a> {
    h: &'a Hypergraph,
    choices: ChoiceStream,
    exclusion: Exclusion,
    owner: Vec<u32>,
    target_of: Vec<u32>,
    evicted_from: Vec<u32>,
    moves: Vec<u64>,
    rounds: u64,
}

impl<'a> State<'a> {
    fn new(h: &'a Hypergraph, seed: u64, exclusion: Exclusion) -> Self {
        State {
            h,
            choices: ChoiceStream::new(seed),
            exclusion,
            owner: vec![NONE; h.n()],
            target_of: vec![NONE; h.m()],
            evicted_from: vec![NONE; h.m()],
            moves: vec![0; h.m()],
            rounds: 0,
        }
    }

    /// Moves `e` to a random incidence; returns the new vertex and the
    /// edge evicted from it, if any.
    fn step(&mut self, e: usize) -> (Vertex, Option<usize>) {
        let previous = (self.evicted_from[e] != NONE).then_some(self.evicted_from[e]);
        let v = pick_bucket(self.h.edge(e), previous, self.exclusion, &self.choices, e, self.moves[e]);
        self.moves[e] += 1;
        self.rounds += 1;

        let old = self.target_of[e];
        if old == v {
            return (v, None);
        }
        if old != NONE {
            self.owner[old as usize] = NONE;
        }
        let evicted = std::mem::replace(&mut self.owner[v as usize], e as u32);
        self.target_of[e] = v;
        let evicted = (evicted != NONE).then(|| {
            let evicted = evicted as usize;
            self.target_of[evicted] = NONE;
            self.evicted_from[evicted] = v;
            evicted
        });
        if cfg!(debug_assertions) {
            assert!(self.h.edge(e).contains(&v));
            assert_eq!(self.owner[v as usize] as usize, e);
        }
        (v, evicted)
    }

    fn orientation(&self) -> PartialOrientation {
        PartialOrientation::from_assignment(
            self.target_of.iter().map(|&v| (v != NONE).then_some(v)).collect(),
        )
    }

    fn trace(self, done: bool) -> MoveTrace {
        MoveTrace {
            rounds: self.rounds,
            moves: self.moves,
            status: if done { Termination::Done } else { Termination::CapExceeded },
        }
    }
}

/// Runs REP until every edge is oriented or `config.cap` rounds have passed.
pub fn run_rep(h: &Hypergraph, policy: &Policy, seed: u64, config: ProcessConfig) -> RepRun {
    let mut state = State::new(h, seed, config.exclusion);
    let mut pool = policy.scheduler(h.m(), seed);
    let mut eligible = vec![true; h.m()];
    while state.rounds < config.cap {
        let Some(e) = pool.pop() else { break };
        assert!(eligible[e], "policy chose ineligible edge {e}");
        eligible[e] = false;
        if let (_, Some(evicted)) = state.step(e) {
            eligible[evicted] = true;
            pool.push(evicted, policy.priority(evicted));
        }
    }
    let done = pool.is_empty();
    let orientation = state.orientation();
    RepRun { trace: state.trace(done), orientation }
}

/// Runs REP' towards the target orientation `target`.
pub fn run_rep_prime(
    h: &Hypergraph,
    target: &Peeling,
    policy: &Policy,
    seed: u64,
    config: ProcessConfig,
) -> MoveTrace {
    assert_eq!(target.m(), h.m(), "target orientation has the wrong size");
    let mut state = State::new(h, seed, config.exclusion);
    let mut pool = policy.scheduler(h.m(), seed);
    let mut eligible = vec![true; h.m()];
    while state.rounds < config.cap {
        let Some(e) = pool.pop() else { break };
        assert!(eligible[e], "policy chose ineligible edge {e}");
        let (v, evicted) = state.step(e);
        if v == target.target(e) {
            eligible[e] = false;
        } else {
            pool.push(e, policy.priority(e));
        }
        if let Some(evicted) = evicted {
            if !eligible[evicted] {
                eligible[evicted] = true;
                pool.push(evicted, policy.priority(evicted));
            }
        }
    }
    let done = pool.is_empty();
    if done && cfg!(debug_assertions) {
        assert!((0..h.m()).all(|e| state.target_of[e] == target.target(e)));
    }
    state.trace(done)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelTrace {
    /// Moves per key (edge) and total rounds.
    pub trace: MoveTrace,
    /// Loop iterations executed by each of the `m` threads.
    pub thread_work: Vec<u64>,
}

/// Simulates `m` threads, thread `i` starting random walk insertion of key
/// `i`, under an arbitrary scheduler with atomic swaps.
///
/// The schedule picks a thread that still holds an unplaced key; that
/// thread performs one swap and keeps whatever key it evicted. `max-peel`
/// ranks a thread by the peel number of the key it currently holds. Each
/// thread applies the `i_old` rule of `config.exclusion` to its own walk.
pub fn run_parallel_insertion_sim(
    h: &Hypergraph,
    schedule: &Policy,
    seed: u64,
    config: ProcessConfig,
) -> ParallelTrace {
    let m = h.m();
    let mut state = State::new(h, seed, config.exclusion);
    let mut pool = schedule.scheduler(m, seed);
    let mut holding: Vec<usize> = (0..m).collect();
    let mut thread_work = vec![0u64; m];
    while state.rounds < config.cap {
        let Some(thread) = pool.pop() else { break };
        let key = holding[thread];
        debug_assert_eq!(state.target_of[key], NONE, "thread {thread} holds a placed key");
        thread_work[thread] += 1;
        if let (_, Some(evicted)) = state.step(key) {
            holding[thread] = evicted;
            pool.push(thread, schedule.priority(evicted));
        }
    }
    let done = pool.is_empty();
    ParallelTrace { trace: state.trace(done), thread_work }
}

/// Monte-Carlo estimate of both sides of `E[moves(e)] <= k + Σ_{e'∈D(e)} E[moves(e')]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Estimate {
    pub edge: usize,
    /// Mean of `moves(e)`.
    pub lhs: f64,
    /// `k` plus the multiplicity-weighted mean moves of `D(e)`.
    pub rhs: f64,
    pub trials: u64,
}

impl Lemma3Estimate {
    pub fn holds_with_slack(&self, slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + slack)
    }
}

/// Runs REP' `trials` times (seeds derived from `seed`) and estimates both
/// sides of the per-edge move bound for every edge in `edges`.
pub fn verify_lemma3(
    h: &Hypergraph,
    target: &Peeling,
    edges: &[usize],
    policy: &Policy,
    seed: u64,
    trials: u64,
) -> Vec<Lemma3Estimate> {
    let config = ProcessConfig::with_default_cap(h);
    let mut sums = vec![0u64; h.m()];
    for trial in 0..trials {
        let trace = run_rep_prime(h, target, policy, derive_seed(seed, trial), config);
        for (sum, &mv) in sums.iter_mut().zip(&trace.moves) {
            *sum += mv;
        }
    }
    let means: Vec<f64> = sums.iter().map(|&s| s as f64 / trials.max(1) as f64).collect();
    edges
        .iter()
        .map(|&e| {
            let dependents = crate::peeling::direct_dependents(h, target, e);
            let rhs = h.k() as f64
                + dependents
                    .iter()
                    .map(|&(other, mult)| mult as f64 * means[other])
                    .sum::<f64>();
            Lemma3Estimate { edge: e, lhs: means[e], rhs, trials }
        })
        .collect()
}
