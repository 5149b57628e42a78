//! Peeling of hypergraphs.
//!
//! Peeling repeatedly picks a vertex of degree 1, orients its unique
//! remaining edge to it and deletes that edge. The resulting orientation
//! `F` together with the order in which edges were removed is a [`Peeling`].
//! If peeling gets stuck, what is left is the 2-core.

mod dependence;
mod numbers;

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::rng::{stream_rng, Stream};

pub use dependence::{
    build_edge_dependence_graph, build_vertex_dependence_graph, direct_dependents,
    EdgeDependenceGraph, VertexDependenceGraph,
};
pub use numbers::{
    brute_force_path_count, count_paths, peeling_numbers_recursive, vertex_peel_numbers,
    PeelReport, DEFAULT_PATH_BUDGET,
};

/// Per-edge assignment to an incident vertex or to nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrientation {
    assignment: Vec<Option<Vertex>>,
}

impl PartialOrientation {
    pub fn unoriented(m: usize) -> Self {
        PartialOrientation { assignment: vec![None; m] }
    }

    pub fn from_assignment(assignment: Vec<Option<Vertex>>) -> Self {
        PartialOrientation { assignment }
    }

    pub fn get(&self, e: usize) -> Option<Vertex> {
        self.assignment[e]
    }

    pub fn assignment(&self) -> &[Option<Vertex>] {
        &self.assignment
    }

    pub fn oriented_count(&self) -> usize {
        self.assignment.iter().flatten().count()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Checks that every oriented edge points to one of its incidences and
    /// that no two oriented edges share a vertex.
    pub fn validate(&self, h: &Hypergraph) -> Result<()> {
        if self.assignment.len() != h.m() {
            return Err(Error::InvalidOrientation(format!(
                "{} assignments for {} edges",
                self.assignment.len(),
                h.m()
            )));
        }
        let mut owner = vec![u32::MAX; h.n()];
        for (e, v) in self.assignment.iter().enumerate() {
            let Some(v) = *v else { continue };
            if !h.edge(e).contains(&v) {
                return Err(Error::InvalidOrientation(format!("edge {e} oriented to non-incident {v}")));
            }
            let slot = &mut owner[v as usize];
            if *slot != u32::MAX {
                return Err(Error::InvalidOrientation(format!(
                    "edges {} and {e} both oriented to {v}",
                    *slot
                )));
            }
            *slot = e as u32;
        }
        Ok(())
    }
}

/// A total injective orientation together with the peel order witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peeling {
    targets: Vec<Vertex>,
    order: Vec<u32>,
}

impl Peeling {
    /// Builds a peeling from explicit parts after replaying it: at its turn,
    /// each edge's target must be a vertex of degree 1 among the edges not
    /// yet removed.
    pub fn from_parts(h: &Hypergraph, targets: Vec<Vertex>, order: Vec<u32>) -> Result<Self> {
        let m = h.m();
        if targets.len() != m || order.len() != m {
            return Err(Error::InvalidOrientation(format!(
                "expected {m} targets and order entries, got {} and {}",
                targets.len(),
                order.len()
            )));
        }
        let mut seen = vec![false; m];
        let mut degree = h.degree_sequence();
        for &e in &order {
            let e = e as usize;
            if e >= m || std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidOrientation(format!("peel order repeats or overflows at {e}")));
            }
            let v = targets[e];
            if h.multiplicity(e, v) != 1 || degree[v as usize] != 1 {
                return Err(Error::InvalidOrientation(format!(
                    "edge {e} is not the only remaining edge at {v}"
                )));
            }
            for &u in h.edge(e) {
                degree[u as usize] -= 1;
            }
        }
        Ok(Peeling { targets, order })
    }

    /// `F(e)`.
    pub fn target(&self, e: usize) -> Vertex {
        self.targets[e]
    }

    pub fn targets(&self) -> &[Vertex] {
        &self.targets
    }

    /// Edge indices in the order they were peeled.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    /// Position of each edge in the peel order.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (i, &e) in self.order.iter().enumerate() {
            rank[e as usize] = i;
        }
        rank
    }

    pub fn to_partial(&self) -> PartialOrientation {
        PartialOrientation::from_assignment(self.targets.iter().map(|&v| Some(v)).collect())
    }
}

/// The edges and vertex degrees left when peeling gets stuck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCore {
    /// Surviving edge indices, increasing.
    pub edges: Vec<usize>,
    /// Degree of every vertex within the surviving edges.
    pub degrees: Vec<u32>,
}

impl TwoCore {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeelOutcome {
    Peeled(Peeling),
    Stuck {
        /// Orientation of the edges that did peel.
        partial: PartialOrientation,
        order: Vec<u32>,
        core: TwoCore,
    },
}

impl PeelOutcome {
    pub fn peeling(&self) -> Option<&Peeling> {
        match self {
            PeelOutcome::Peeled(p) => Some(p),
            PeelOutcome::Stuck { .. } => None,
        }
    }

    pub fn into_peeling(self) -> Option<Peeling> {
        match self {
            PeelOutcome::Peeled(p) => Some(p),
            PeelOutcome::Stuck { .. } => None,
        }
    }

    pub fn core(&self) -> Option<&TwoCore> {
        match self {
            PeelOutcome::Peeled(_) => None,
            PeelOutcome::Stuck { core, .. } => Some(core),
        }
    }
}

/// Set of current degree-1 vertices.
#[allow(clippy::large_enum_variant)]
enum DegreeOnePool {
    /// Lowest index first; stale entries are skipped lazily.
    Ordered { heap: BinaryHeap<Reverse<Vertex>>, member: Vec<bool> },
    /// Uniform choice with swap-remove deletion.
    Random { items: Vec<Vertex>, slot: Vec<u32>, rng: ChaCha8Rng },
}

const ABSENT: u32 = u32::MAX;

impl DegreeOnePool {
    fn new(n: usize, randomize: bool, seed: u64) -> Self {
        if randomize {
            DegreeOnePool::Random {
                items: Vec::new(),
                slot: vec![ABSENT; n],
                rng: stream_rng(seed, Stream::Peeling),
            }
        } else {
            DegreeOnePool::Ordered { heap: BinaryHeap::new(), member: vec![false; n] }
        }
    }

    fn insert(&mut self, v: Vertex) {
        match self {
            DegreeOnePool::Ordered { heap, member } => {
                if !member[v as usize] {
                    member[v as usize] = true;
                    heap.push(Reverse(v));
                }
            }
            DegreeOnePool::Random { items, slot, .. } => {
                if slot[v as usize] == ABSENT {
                    slot[v as usize] = items.len() as u32;
                    items.push(v);
                }
            }
        }
    }

    fn remove(&mut self, v: Vertex) {
        match self {
            DegreeOnePool::Ordered { member, .. } => member[v as usize] = false,
            DegreeOnePool::Random { items, slot, .. } => {
                let i = slot[v as usize];
                if i == ABSENT {
                    return;
                }
                items.swap_remove(i as usize);
                if let Some(&moved) = items.get(i as usize) {
                    slot[moved as usize] = i;
                }
                slot[v as usize] = ABSENT;
            }
        }
    }

    fn take(&mut self) -> Option<Vertex> {
        let v = match self {
            DegreeOnePool::Ordered { heap, member } => {
                while let Some(Reverse(v)) = heap.pop() {
                    if std::mem::replace(&mut member[v as usize], false) {
                        return Some(v);
                    }
                }
                return None;
            }
            DegreeOnePool::Random { items, rng, .. } => {
                if items.is_empty() {
                    return None;
                }
                items[rng.random_range(0..items.len())]
            }
        };
        self.remove(v);
        Some(v)
    }
}

/// Peels `h`. With `randomize` the degree-1 vertex is chosen uniformly among
/// all current ones (a random peeling); otherwise the lowest index wins.
pub fn peel(h: &Hypergraph, seed: u64, randomize: bool) -> PeelOutcome {
    let m = h.m();
    let mut degree = h.degree_sequence();
    // xor of incident edge ids, one term per incidence; at degree 1 it is
    // the remaining edge
    let mut incident_xor = vec![0u32; h.n()];
    for (e, edge) in h.edges().enumerate() {
        for &v in edge {
            incident_xor[v as usize] ^= e as u32;
        }
    }
    let mut pool = DegreeOnePool::new(h.n(), randomize, seed);
    for (v, &d) in degree.iter().enumerate() {
        if d == 1 {
            pool.insert(v as Vertex);
        }
    }

    let mut targets = vec![None; m];
    let mut order = Vec::with_capacity(m);
    while let Some(v) = pool.take() {
        let e = incident_xor[v as usize] as usize;
        debug_assert_eq!(degree[v as usize], 1);
        targets[e] = Some(v);
        order.push(e as u32);
        for &u in h.edge(e) {
            let d = &mut degree[u as usize];
            *d -= 1;
            incident_xor[u as usize] ^= e as u32;
            match *d {
                1 => pool.insert(u),
                0 => pool.remove(u),
                _ => {}
            }
        }
    }

    if order.len() == m {
        let targets = targets.into_iter().map(|v| v.expect("all edges peeled")).collect();
        PeelOutcome::Peeled(Peeling { targets, order })
    } else {
        let edges = (0..m).filter(|&e| targets[e].is_none()).collect();
        PeelOutcome::Stuck {
            partial: PartialOrientation::from_assignment(targets),
            order,
            core: TwoCore { edges, degrees: degree },
        }
    }
}

/// The 2-core of `h`: empty exactly when `h` is peelable.
pub fn two_core(h: &Hypergraph) -> TwoCore {
    match peel(h, 0, false) {
        PeelOutcome::Peeled(_) => TwoCore { edges: Vec::new(), degrees: vec![0; h.n()] },
        PeelOutcome::Stuck { core, .. } => core,
    }
}

/// Samples hypergraphs with consecutive derived seeds until one is peelable.
/// Returns the hypergraph, its random peeling and the number of rejections.
pub fn sample_peelable(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    max_attempts: u64,
) -> Result<(Hypergraph, Peeling, u64)> {
    for attempt in 0..max_attempts {
        let h = Hypergraph::sample(n, m, k, crate::rng::derive_seed(seed, attempt))?;
        if let PeelOutcome::Peeled(f) = peel(&h, h.seed(), true) {
            return Ok((h, f, attempt));
        }
    }
    Err(Error::invalid(format!(
        "no peelable H({n}, {m}, {k}) found in {max_attempts} attempts"
    )))
}
