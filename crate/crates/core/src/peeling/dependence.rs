//! Direct dependence and the two dependence graphs.
//!
//! Edge `e` directly depends on `e' != e` when `F(e)` is an incidence of
//! `e'`; the dependence has the multiplicity of `F(e)` in `e'`. Every such
//! `e'` is peeled before `e`.

use std::collections::BTreeMap;

use super::Peeling;
use crate::hypergraph::{Hypergraph, Vertex};

/// `D(e)` as `(edge, multiplicity)` pairs sorted by edge. `e` itself is
/// never included, even if it contains `F(e)` twice.
pub fn direct_dependents(h: &Hypergraph, f: &Peeling, e: usize) -> Vec<(usize, u32)> {
    let v = f.target(e);
    (0..h.m())
        .filter(|&other| other != e)
        .filter_map(|other| {
            let mult = h.multiplicity(other, v);
            (mult > 0).then_some((other, mult))
        })
        .collect()
}

/// Directed multigraph on edges: arc `(e, e')` for every `e' ∈ D(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDependenceGraph {
    out: Vec<Vec<(u32, u32)>>,
}

impl EdgeDependenceGraph {
    pub fn m(&self) -> usize {
        self.out.len()
    }

    /// `D(e)` with multiplicities.
    pub fn dependents(&self, e: usize) -> &[(u32, u32)] {
        &self.out[e]
    }

    pub fn multiplicity(&self, e: usize, other: usize) -> u32 {
        self.out[e]
            .iter()
            .find(|&&(t, _)| t as usize == other)
            .map_or(0, |&(_, mult)| mult)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(e, arcs)| arcs.iter().map(move |&(t, mult)| (e, t as usize, mult)))
    }
}

pub fn build_edge_dependence_graph(h: &Hypergraph, f: &Peeling) -> EdgeDependenceGraph {
    let index = h.incidence_index();
    let out = (0..h.m())
        .map(|e| {
            let mut arcs: Vec<(u32, u32)> = Vec::new();
            for &other in index.edges_at(f.target(e)) {
                if other as usize == e {
                    continue;
                }
                match arcs.last_mut() {
                    Some((t, mult)) if *t == other => *mult += 1,
                    _ => arcs.push((other, 1)),
                }
            }
            arcs
        })
        .collect();
    EdgeDependenceGraph { out }
}

/// Directed multigraph on vertices: for every edge `e'` with `F(e') = v'`
/// and every incidence `v != v'` of `e'`, one arc `(v, v')`. Extra copies
/// of `v'` inside `e'` create no self-loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexDependenceGraph {
    n: usize,
    out: Vec<Vec<(Vertex, u32)>>,
    into: Vec<Vec<(Vertex, u32)>>,
}

impl VertexDependenceGraph {
    /// Builds a graph from explicit arcs; parallel arcs add up.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (Vertex, Vertex, u32)>) -> Self {
        let mut merged: BTreeMap<(Vertex, Vertex), u32> = BTreeMap::new();
        for (u, v, mult) in arcs {
            assert!((u as usize) < n && (v as usize) < n, "arc ({u}, {v}) out of range");
            if mult > 0 {
                *merged.entry((u, v)).or_default() += mult;
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut into = vec![Vec::new(); n];
        for ((u, v), mult) in merged {
            out[u as usize].push((v, mult));
            into[v as usize].push((u, mult));
        }
        VertexDependenceGraph { n, out, into }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self, v: Vertex) -> &[(Vertex, u32)] {
        &self.out[v as usize]
    }

    pub fn predecessors(&self, v: Vertex) -> &[(Vertex, u32)] {
        &self.into[v as usize]
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u32 {
        self.out[u as usize]
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, mult)| mult)
    }

    /// Number of arcs counted with multiplicity.
    pub fn arc_count(&self) -> u64 {
        self.out.iter().flatten().map(|&(_, mult)| mult as u64).sum()
    }

    /// Vertices in topological order (sources first), or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<Vertex>> {
        let mut indegree: Vec<usize> = self.into.iter().map(Vec::len).collect();
        let mut ready: Vec<Vertex> = (0..self.n as Vertex).filter(|&v| indegree[v as usize] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &(v, _) in &self.out[u as usize] {
                indegree[v as usize] -= 1;
                if indegree[v as usize] == 0 {
                    ready.push(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

pub fn build_vertex_dependence_graph(h: &Hypergraph, f: &Peeling) -> VertexDependenceGraph {
    let arcs = h.edges().enumerate().flat_map(|(e, edge)| {
        let target = f.target(e);
        edge.iter().filter(move |&&v| v != target).map(move |&v| (v, target, 1))
    });
    VertexDependenceGraph::from_arcs(h.n(), arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> (Hypergraph, Peeling) {
        let h = Hypergraph::from_explicit(4, 3, [[0, 1, 2], [1, 2, 3]]).unwrap();
        // e2 peels first through vertex 3, then e1 through vertex 1
        let f = Peeling::from_parts(&h, vec![1, 3], vec![1, 0]).unwrap();
        (h, f)
    }

    #[test]
    fn direct_dependence_by_scan() {
        let (h, f) = example();
        assert_eq!(direct_dependents(&h, &f, 0), vec![(1, 1)]);
        assert!(direct_dependents(&h, &f, 1).is_empty());
        let g = build_edge_dependence_graph(&h, &f);
        assert_eq!(g.dependents(0), &[(1, 1)]);
        assert!(g.dependents(1).is_empty());
    }

    #[test]
    fn doubled_target_counts_twice() {
        let h = Hypergraph::from_explicit(4, 3, [[0, 1, 2], [2, 2, 3]]).unwrap();
        let f = Peeling::from_parts(&h, vec![2, 3], vec![1, 0]).unwrap();
        assert_eq!(direct_dependents(&h, &f, 0), vec![(1, 2)]);
        assert_eq!(build_edge_dependence_graph(&h, &f).multiplicity(0, 1), 2);
    }

    #[test]
    fn isolated_target_has_no_dependents() {
        let h = Hypergraph::from_explicit(6, 3, [[0, 1, 2], [3, 4, 5]]).unwrap();
        let f = Peeling::from_parts(&h, vec![0, 3], vec![0, 1]).unwrap();
        assert!(direct_dependents(&h, &f, 0).is_empty());
    }

    #[test]
    fn vertex_graph_example() {
        let (h, f) = example();
        let g = build_vertex_dependence_graph(&h, &f);
        assert_eq!(g.predecessors(3), &[(1, 1), (2, 1)]);
        assert_eq!(g.predecessors(1), &[(0, 1), (2, 1)]);
        assert!(g.predecessors(0).is_empty());
        assert!(g.predecessors(2).is_empty());
        assert_eq!(g.arc_count(), 4);
        assert!(g.is_acyclic());
    }

    #[test]
    fn empty_vertex_graph() {
        let h = Hypergraph::sample(5, 0, 3, 1).unwrap();
        let f = Peeling::from_parts(&h, vec![], vec![]).unwrap();
        let g = build_vertex_dependence_graph(&h, &f);
        assert_eq!(g.n(), 5);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn no_self_loop_from_repeated_target() {
        let h = Hypergraph::from_explicit(3, 3, [[0, 0, 1]]).unwrap();
        let f = Peeling::from_parts(&h, vec![1], vec![0]).unwrap();
        let g = build_vertex_dependence_graph(&h, &f);
        assert_eq!(g.multiplicity(0, 1), 2);
        assert_eq!(g.multiplicity(1, 1), 0);
    }

    #[test]
    fn cycle_detection() {
        let g = VertexDependenceGraph::from_arcs(2, [(0, 1, 1), (1, 0, 1)]);
        assert!(!g.is_acyclic());
    }
}
