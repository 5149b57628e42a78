//! Peeling numbers and path counts.
//!
//! `peel(e)` is the number of non-trivial paths starting at `e` in the edge
//! dependence graph, `p(v)` the number of paths (trivial one included)
//! ending at `v` in the vertex dependence graph. Both use 64-bit saturating
//! counters; an overflow flag reports saturation.

use serde::{Deserialize, Serialize};

use super::{Peeling, VertexDependenceGraph};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};

/// Default enumeration budget of [`brute_force_path_count`].
pub const DEFAULT_PATH_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, Default)]
struct Saturating {
    overflow: bool,
}

impl Saturating {
    fn add(&mut self, a: u64, b: u64) -> u64 {
        a.checked_add(b).unwrap_or_else(|| {
            self.overflow = true;
            u64::MAX
        })
    }

    fn mul(&mut self, a: u64, b: u64) -> u64 {
        a.checked_mul(b).unwrap_or_else(|| {
            self.overflow = true;
            u64::MAX
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelReport {
    /// `peel(e)` per edge.
    pub peel_numbers: Vec<u64>,
    /// `p(v)` per vertex, trivial path included.
    pub path_counts: Vec<u64>,
    /// `Σ_e peel(e)`.
    pub total_peel: u64,
    /// `Σ_v p(v)`.
    pub total_paths: u64,
    pub overflow: bool,
}

impl PeelReport {
    /// `Σ_v p(v) − n`, the number of non-trivial paths in the vertex graph.
    pub fn nontrivial_vertex_paths(&self) -> u64 {
        self.total_paths.saturating_sub(self.path_counts.len() as u64)
    }
}

/// Computes `peel(e) = Σ_{e' ∈ D(e)} (1 + peel(e'))` in peel order, plus the
/// per-vertex path counts `p(v)`.
///
/// `p` is filled by a single backwards pass: the arcs into `F(e')` come from
/// the other incidences of `e'`, and the edge owning each such vertex is
/// peeled after `e'`.
pub fn peeling_numbers_recursive(h: &Hypergraph, f: &Peeling) -> PeelReport {
    let mut sat = Saturating::default();
    let index = h.incidence_index();

    let mut peel = vec![0u64; h.m()];
    for &e in f.order() {
        let e = e as usize;
        let mut sum = 0u64;
        for &other in index.edges_at(f.target(e)) {
            let other = other as usize;
            if other != e {
                let term = sat.add(1, peel[other]);
                sum = sat.add(sum, term);
            }
        }
        peel[e] = sum;
    }

    let mut paths = vec![1u64; h.n()];
    for &e in f.order().iter().rev() {
        let e = e as usize;
        let target = f.target(e);
        let mut sum = 1u64;
        for &v in h.edge(e) {
            if v != target {
                sum = sat.add(sum, paths[v as usize]);
            }
        }
        paths[target as usize] = sum;
    }

    let total_peel = peel.iter().fold(0, |acc, &x| sat.add(acc, x));
    let total_paths = paths.iter().fold(0, |acc, &x| sat.add(acc, x));
    PeelReport {
        peel_numbers: peel,
        path_counts: paths,
        total_peel,
        total_paths,
        overflow: sat.overflow,
    }
}

/// Number of paths in the vertex dependence graph ending at `end`,
/// including the trivial path, computed directly from `h` and `f` by
/// dynamic programming over the peel order. The flag reports saturation.
pub fn count_paths(h: &Hypergraph, f: &Peeling, end: Vertex) -> (u64, bool) {
    let mut sat = Saturating::default();
    let mut p = vec![0u64; h.n()];
    p[end as usize] = 1;
    for &e in f.order() {
        let e = e as usize;
        let target = f.target(e);
        let carried = p[target as usize];
        if carried == 0 {
            continue;
        }
        for &v in h.edge(e) {
            if v != target {
                p[v as usize] = sat.add(p[v as usize], carried);
            }
        }
    }
    let total = p.iter().fold(0, |acc, &x| sat.add(acc, x));
    (total, sat.overflow)
}

/// Number of non-trivial paths starting at each vertex of `g`, computed on
/// the graph itself in reverse topological order.
pub fn vertex_peel_numbers(g: &VertexDependenceGraph) -> Result<(Vec<u64>, bool)> {
    let order = g
        .topological_order()
        .ok_or_else(|| Error::InvalidOrientation("dependence graph has a cycle".into()))?;
    let mut sat = Saturating::default();
    let mut peel = vec![0u64; g.n()];
    for &u in order.iter().rev() {
        let mut sum = 0u64;
        for &(v, mult) in g.successors(u) {
            let via = sat.add(1, peel[v as usize]);
            let term = sat.mul(mult as u64, via);
            sum = sat.add(sum, term);
        }
        peel[u as usize] = sum;
    }
    Ok((peel, sat.overflow))
}

/// Exhaustive enumeration of the paths ending at `end`, walking arcs
/// backwards. Each enumerated vertex sequence contributes the product of its
/// arc multiplicities. Fails once more than `budget` sequences are visited.
pub fn brute_force_path_count(g: &VertexDependenceGraph, end: Vertex, budget: u64) -> Result<u128> {
    let mut total: u128 = 0;
    let mut visited: u64 = 0;
    let mut stack: Vec<(Vertex, u128)> = vec![(end, 1)];
    while let Some((v, weight)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(Error::InstanceTooLarge { budget });
        }
        total += weight;
        for &(u, mult) in g.predecessors(v) {
            stack.push((u, weight * mult as u128));
        }
    }
    Ok(total)
}
