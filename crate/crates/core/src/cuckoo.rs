//! A `k`-ary cuckoo hash table with buckets of size one and random walk
//! insertion.
//!
//! Keys are opaque 64-bit ids; each carries its `k` bucket choices, given at
//! insertion time. No hash function is evaluated. Internally keys get dense
//! slots in insertion order, and the random choice for the `j`-th move of
//! slot `s` is the counter draw `(seed, s, j)`, the same layout the eviction
//! processes use for edge `s`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::rng::{derive_seed, ChoiceStream};
use crate::walk::{pick_bucket, Exclusion};

const EMPTY: u32 = u32::MAX;

/// Default per-insertion move cap, `100·k·⌈log2(n+2)⌉`.
pub fn default_move_cap(n: usize, k: usize) -> u64 {
    let log = (n as f64 + 2.0).log2().ceil() as u64;
    100 * k as u64 * log
}

/// Default total budget of a bulk run, `100·k·n·log2(n)`.
pub fn default_bulk_budget(n: usize, k: usize) -> u64 {
    let log = (n.max(2) as f64).log2();
    (100.0 * k as f64 * n as f64 * log).ceil() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableConfig {
    pub k: usize,
    /// Avoid the bucket a key was just evicted from.
    pub exclusion: Exclusion,
    /// Loop iterations allowed per insertion call.
    pub move_cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertStatus {
    Placed,
    /// The walk ran out of moves; one key is left unplaced.
    CapExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InsertOutcome {
    pub status: InsertStatus,
    /// Loop iterations of this call, moves of evicted keys included.
    pub moves: u64,
}

#[derive(Clone, Debug)]
pub struct CuckooTable {
    n: usize,
    config: TableConfig,
    choices: ChoiceStream,
    buckets: Vec<u32>,
    slots: HashMap<u64, u32>,
    ids: Vec<u64>,
    incidences: Vec<Vertex>,
    position: Vec<u32>,
    moves: Vec<u64>,
    unplaced: Vec<u32>,
    placed: usize,
}

impl CuckooTable {
    pub fn new(n: usize, seed: u64, config: TableConfig) -> Result<Self> {
        if n == 0 || n > u32::MAX as usize {
            return Err(Error::invalid(format!("table size n = {n} out of range")));
        }
        if config.k < 2 {
            return Err(Error::invalid(format!("k = {} must be at least 2", config.k)));
        }
        if config.move_cap == 0 {
            return Err(Error::invalid("move cap must be positive"));
        }
        Ok(CuckooTable {
            n,
            config,
            choices: ChoiceStream::new(seed),
            buckets: vec![EMPTY; n],
            slots: HashMap::new(),
            ids: Vec::new(),
            incidences: Vec::new(),
            position: Vec::new(),
            moves: Vec::new(),
            unplaced: Vec::new(),
            placed: 0,
        })
    }

    /// Table with the default move cap and `i_old` exclusion of all copies.
    pub fn with_defaults(n: usize, k: usize, seed: u64) -> Result<Self> {
        let config = TableConfig {
            k,
            exclusion: Exclusion::AllCopies,
            move_cap: default_move_cap(n, k),
        };
        Self::new(n, seed, config)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &TableConfig {
        &self.config
    }

    /// Number of keys sitting in a bucket; equals the occupied bucket count.
    pub fn len(&self) -> usize {
        self.placed
    }

    pub fn is_empty(&self) -> bool {
        self.placed == 0
    }

    pub fn occupied_buckets(&self) -> usize {
        self.buckets.iter().filter(|&&b| b != EMPTY).count()
    }

    fn keys_of(&self, slot: u32) -> &[Vertex] {
        let k = self.config.k;
        &self.incidences[slot as usize * k..(slot as usize + 1) * k]
    }

    /// Inserts `key` with bucket choices `incidences` by random walk.
    pub fn insert(&mut self, key: u64, incidences: &[Vertex]) -> Result<InsertOutcome> {
        if incidences.len() != self.config.k {
            return Err(Error::invalid(format!(
                "key {key} has {} bucket choices, expected {}",
                incidences.len(),
                self.config.k
            )));
        }
        if let Some(&b) = incidences.iter().find(|&&b| b as usize >= self.n) {
            return Err(Error::invalid(format!("bucket {b} out of range for key {key}")));
        }
        if self.slots.contains_key(&key) {
            return Err(Error::DuplicateKey(key));
        }
        let slot = self.ids.len() as u32;
        self.slots.insert(key, slot);
        self.ids.push(key);
        self.incidences.extend_from_slice(incidences);
        self.position.push(EMPTY);
        self.moves.push(0);

        let mut current = slot;
        let mut previous: Option<Vertex> = None;
        let mut moves = 0u64;
        loop {
            let draw = self.moves[current as usize];
            let bucket = pick_bucket(
                self.keys_of(current),
                previous,
                self.config.exclusion,
                &self.choices,
                current as usize,
                draw,
            );
            self.moves[current as usize] += 1;
            moves += 1;

            let evicted = std::mem::replace(&mut self.buckets[bucket as usize], current);
            self.position[current as usize] = bucket;
            if evicted == EMPTY {
                self.placed += 1;
                self.debug_check_bucket(bucket);
                return Ok(InsertOutcome { status: InsertStatus::Placed, moves });
            }
            self.position[evicted as usize] = EMPTY;
            self.debug_check_bucket(bucket);
            current = evicted;
            previous = Some(bucket);
            if moves >= self.config.move_cap {
                self.unplaced.push(current);
                return Ok(InsertOutcome { status: InsertStatus::CapExceeded, moves });
            }
        }
    }

    fn debug_check_bucket(&self, bucket: Vertex) {
        if cfg!(debug_assertions) {
            let slot = self.buckets[bucket as usize];
            assert!(self.keys_of(slot).contains(&bucket));
            assert_eq!(self.position[slot as usize], bucket);
        }
    }

    /// True iff `key` occupies one of its buckets.
    pub fn contains(&self, key: u64) -> bool {
        self.slots
            .get(&key)
            .is_some_and(|&slot| self.position[slot as usize] != EMPTY)
    }

    /// Bucket currently holding `key`.
    pub fn bucket_of(&self, key: u64) -> Option<Vertex> {
        let slot = *self.slots.get(&key)?;
        let b = self.position[slot as usize];
        (b != EMPTY).then_some(b)
    }

    /// Keys left homeless by capped insertions.
    pub fn unplaced(&self) -> Vec<u64> {
        self.unplaced.iter().map(|&s| self.ids[s as usize]).collect()
    }

    /// How often `key` has moved in total.
    pub fn moves_of(&self, key: u64) -> Option<u64> {
        self.slots.get(&key).map(|&s| self.moves[s as usize])
    }

    /// Per-key move counters in insertion order.
    pub fn move_counts(&self) -> &[u64] {
        &self.moves
    }

    /// Full consistency check of the bucket array against the key store.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = 0usize;
        for (b, &slot) in self.buckets.iter().enumerate() {
            if slot == EMPTY {
                continue;
            }
            seen += 1;
            if !self.keys_of(slot).contains(&(b as Vertex)) {
                return Err(Error::InvalidOrientation(format!("bucket {b} holds a foreign key")));
            }
            if self.position[slot as usize] != b as Vertex {
                return Err(Error::InvalidOrientation(format!("key in bucket {b} placed elsewhere")));
            }
        }
        let positioned = self.position.iter().filter(|&&p| p != EMPTY).count();
        if seen != self.placed || positioned != self.placed {
            return Err(Error::InvalidOrientation(format!(
                "{seen} occupied buckets, {positioned} placed keys, counter {}",
                self.placed
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkParams {
    pub n: usize,
    pub k: usize,
    pub load: f64,
    pub seed: u64,
    pub exclusion: Exclusion,
    pub trials: u64,
    /// Per-insertion cap; `None` uses [`default_move_cap`].
    pub move_cap: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub keys: usize,
    pub total_moves: u64,
    pub mean_moves: f64,
    /// Largest per-key move counter.
    pub max_moves: u64,
    /// Insertions that hit a cap.
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkSummary {
    pub trials: Vec<TrialRecord>,
    /// Mean over trials of moves per key.
    pub mean_moves: f64,
    pub max_moves: u64,
    pub failure_rate: f64,
    pub total_rounds: u64,
}

/// Inserts `⌊load·n⌋` keys drawn as `H(n, m, k)` sequentially, once per trial.
///
/// Trial `t` uses seed `derive_seed(seed, t)` for both the keys and the walk.
/// A trial stops at its first capped insertion, or when the total budget
/// [`default_bulk_budget`] runs out, and then counts as failed.
pub fn bulk_insert_experiment(params: &BulkParams) -> Result<BulkSummary> {
    if !(params.load > 0.0 && params.load < 1.0) {
        return Err(Error::invalid(format!("load {} not in (0, 1)", params.load)));
    }
    let m = (params.load * params.n as f64).floor() as usize;
    let move_cap = params.move_cap.unwrap_or_else(|| default_move_cap(params.n, params.k));
    let budget = default_bulk_budget(params.n, params.k);
    let config = TableConfig { k: params.k, exclusion: params.exclusion, move_cap };

    let mut trials = Vec::with_capacity(params.trials as usize);
    for trial in 0..params.trials {
        let seed = derive_seed(params.seed, trial);
        let keys = Hypergraph::sample(params.n, m, params.k, seed)?;
        let mut table = CuckooTable::new(params.n, seed, config)?;
        let mut total_moves = 0u64;
        let mut failures = 0u64;
        for (key, edge) in keys.edges().enumerate() {
            let outcome = table.insert(key as u64, edge)?;
            total_moves += outcome.moves;
            if outcome.status == InsertStatus::CapExceeded || total_moves > budget {
                failures += 1;
                break;
            }
        }
        let max_moves = table.move_counts().iter().copied().max().unwrap_or(0);
        trials.push(TrialRecord {
            trial,
            seed,
            keys: m,
            total_moves,
            mean_moves: if m == 0 { 0.0 } else { total_moves as f64 / m as f64 },
            max_moves,
            failures,
        });
    }

    let count = trials.len().max(1) as f64;
    Ok(BulkSummary {
        mean_moves: trials.iter().map(|t| t.mean_moves).sum::<f64>() / count,
        max_moves: trials.iter().map(|t| t.max_moves).max().unwrap_or(0),
        failure_rate: trials.iter().filter(|t| t.failures > 0).count() as f64 / count,
        total_rounds: trials.iter().map(|t| t.total_moves).sum(),
        trials,
    })
}
