//! Edge-selection policies for the eviction processes.
//!
//! A policy sees only which items (edges, or threads in the parallel
//! simulation) are currently eligible and, for `max-peel`, a fixed priority
//! per item. It never sees future random choices.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Queue: items are served in the order they became eligible.
    Fifo,
    /// Stack, lowest index on top initially. An item that stays eligible
    /// is served again right away, so each eviction chain is followed to its
    /// end: sequential insertion.
    Lifo,
    /// Uniform among eligible items.
    Random,
    /// Largest priority (peel number) first, ties to the lowest index.
    MaxPeel,
    /// Cyclic over item indices, one step per turn.
    RoundRobin,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Fifo,
        PolicyKind::Lifo,
        PolicyKind::Random,
        PolicyKind::MaxPeel,
        PolicyKind::RoundRobin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Fifo => "fifo",
            PolicyKind::Lifo => "lifo",
            PolicyKind::Random => "random",
            PolicyKind::MaxPeel => "max-peel",
            PolicyKind::RoundRobin => "rr",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "fifo" => PolicyKind::Fifo,
            "lifo" => PolicyKind::Lifo,
            "random" => PolicyKind::Random,
            "max-peel" => PolicyKind::MaxPeel,
            "rr" | "round-robin" => PolicyKind::RoundRobin,
            other => return Err(Error::invalid(format!("unknown policy {other:?}"))),
        })
    }
}

/// A policy together with the per-edge priorities `max-peel` needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    kind: PolicyKind,
    priorities: Vec<u64>,
}

impl Policy {
    pub fn new(kind: PolicyKind) -> Self {
        Policy { kind, priorities: Vec::new() }
    }

    /// `max-peel` over the given per-edge peel numbers.
    pub fn max_peel(peel_numbers: Vec<u64>) -> Self {
        Policy { kind: PolicyKind::MaxPeel, priorities: peel_numbers }
    }

    /// Any kind; priorities are only used by `max-peel`.
    pub fn with_priorities(kind: PolicyKind, priorities: Vec<u64>) -> Self {
        Policy { kind, priorities }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn priority(&self, edge: usize) -> u64 {
        self.priorities.get(edge).copied().unwrap_or(0)
    }

    pub(crate) fn scheduler(&self, items: usize, seed: u64) -> Scheduler {
        let mut s = match self.kind {
            PolicyKind::Fifo => Scheduler::Fifo(VecDeque::with_capacity(items)),
            PolicyKind::Lifo => Scheduler::Lifo(Vec::with_capacity(items)),
            PolicyKind::Random => Scheduler::Random(Vec::with_capacity(items), stream_rng(seed, Stream::Policy)),
            PolicyKind::MaxPeel => Scheduler::MaxPeel(BinaryHeap::with_capacity(items)),
            PolicyKind::RoundRobin => Scheduler::RoundRobin(BTreeSet::new(), 0),
        };
        if self.kind == PolicyKind::Lifo {
            for item in (0..items).rev() {
                s.push(item, 0);
            }
        } else {
            for item in 0..items {
                s.push(item, self.priority(item));
            }
        }
        s
    }
}

/// Pool of eligible items. Callers push an item when it becomes eligible
/// and never push an item that is already pooled.
#[allow(clippy::large_enum_variant)]
pub(crate) enum Scheduler {
    Fifo(VecDeque<usize>),
    Lifo(Vec<usize>),
    Random(Vec<usize>, ChaCha8Rng),
    MaxPeel(BinaryHeap<(u64, Reverse<usize>)>),
    RoundRobin(BTreeSet<usize>, usize),
}

impl Scheduler {
    pub(crate) fn push(&mut self, item: usize, priority: u64) {
        match self {
            Scheduler::Fifo(q) => q.push_back(item),
            Scheduler::Lifo(s) => s.push(item),
            Scheduler::Random(pool, _) => pool.push(item),
            Scheduler::MaxPeel(heap) => heap.push((priority, Reverse(item))),
            Scheduler::RoundRobin(set, _) => {
                set.insert(item);
            }
        }
    }

    pub(crate) fn pop(&mut self) -> Option<usize> {
        match self {
            Scheduler::Fifo(q) => q.pop_front(),
            Scheduler::Lifo(s) => s.pop(),
            Scheduler::Random(pool, rng) => {
                if pool.is_empty() {
                    None
                } else {
                    let i = rng.random_range(0..pool.len());
                    Some(pool.swap_remove(i))
                }
            }
            Scheduler::MaxPeel(heap) => heap.pop().map(|(_, Reverse(item))| item),
            Scheduler::RoundRobin(set, cursor) => {
                let item = set.range(*cursor..).next().or_else(|| set.iter().next()).copied()?;
                set.remove(&item);
                *cursor = item + 1;
                Some(item)
            }
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        match self {
            Scheduler::Fifo(q) => q.is_empty(),
            Scheduler::Lifo(s) => s.is_empty(),
            Scheduler::Random(pool, _) => pool.is_empty(),
            Scheduler::MaxPeel(heap) => heap.is_empty(),
            Scheduler::RoundRobin(set, _) => set.is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drain(policy: &Policy, items: usize) -> Vec<usize> {
        let mut s = policy.scheduler(items, 3);
        std::iter::from_fn(|| s.pop()).collect()
    }

    #[test]
    fn initial_orders() {
        assert_eq!(drain(&Policy::new(PolicyKind::Fifo), 4), vec![0, 1, 2, 3]);
        assert_eq!(drain(&Policy::new(PolicyKind::Lifo), 4), vec![0, 1, 2, 3]);
        assert_eq!(drain(&Policy::new(PolicyKind::RoundRobin), 4), vec![0, 1, 2, 3]);
        assert_eq!(drain(&Policy::max_peel(vec![1, 5, 5, 0]), 4), vec![1, 2, 0, 3]);
        let mut random = drain(&Policy::new(PolicyKind::Random), 6);
        random.sort_unstable();
        assert_eq!(random, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn round_robin_wraps() {
        let mut s = Policy::new(PolicyKind::RoundRobin).scheduler(4, 0);
        assert_eq!(s.pop(), Some(0));
        assert_eq!(s.pop(), Some(1));
        s.push(0, 0);
        assert_eq!(s.pop(), Some(2));
        assert_eq!(s.pop(), Some(3));
        assert_eq!(s.pop(), Some(0));
        assert!(s.is_empty());
    }

    #[test]
    fn lifo_follows_the_latest_item() {
        let mut s = Policy::new(PolicyKind::Lifo).scheduler(3, 0);
        assert_eq!(s.pop(), Some(0));
        s.push(0, 0);
        assert_eq!(s.pop(), Some(0));
        assert_eq!(s.pop(), Some(1));
    }

    #[test]
    fn parse_names() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("worst".parse::<PolicyKind>().is_err());
    }
}
