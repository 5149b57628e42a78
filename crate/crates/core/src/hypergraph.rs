//! Random `k`-uniform multiset hypergraphs.
//!
//! Buckets are vertices and keys are hyperedges. A hyperedge is a multiset
//! of `k` vertex incidences stored in generation order; the order carries no
//! meaning and duplicate incidences are allowed.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Vertex (bucket) index.
pub type Vertex = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphFile", into = "HypergraphFile")]
pub struct Hypergraph {
    n: usize,
    k: usize,
    seed: u64,
    // m * k incidences, edge e occupies [e*k, (e+1)*k)
    incidences: Vec<Vertex>,
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if n > u32::MAX as usize + 1 {
        return Err(Error::invalid(format!("n = {n} does not fit 32-bit vertex indices")));
    }
    if k < 2 {
        return Err(Error::invalid(format!("k = {k} must be at least 2")));
    }
    Ok(())
}

impl Hypergraph {
    /// Samples `H_{n,m,k}`: all `k*m` incidences i.i.d. uniform over `0..n`.
    pub fn sample(n: usize, m: usize, k: usize, seed: u64) -> Result<Self> {
        check_shape(n, k)?;
        let mut rng = stream_rng(seed, Stream::Hypergraph);
        let upper = (n - 1) as u32;
        let incidences = (0..m * k).map(|_| rng.random_range(0..=upper)).collect();
        Ok(Hypergraph { n, k, seed, incidences })
    }

    /// Builds a hypergraph from explicit edges; the seed is recorded as 0.
    pub fn from_explicit<E: AsRef<[Vertex]>>(
        n: usize,
        k: usize,
        edges: impl IntoIterator<Item = E>,
    ) -> Result<Self> {
        check_shape(n, k)?;
        let mut incidences = Vec::new();
        for (e, edge) in edges.into_iter().enumerate() {
            let edge = edge.as_ref();
            if edge.len() != k {
                return Err(Error::invalid(format!(
                    "edge {e} has {} incidences, expected {k}",
                    edge.len()
                )));
            }
            if let Some(&v) = edge.iter().find(|&&v| v as usize >= n) {
                return Err(Error::invalid(format!("edge {e} contains vertex {v} >= n = {n}")));
            }
            incidences.extend_from_slice(edge);
        }
        Ok(Hypergraph { n, k, seed: 0, incidences })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.incidences.len() / self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Load factor `m / n`.
    pub fn load(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    pub fn edge(&self, e: usize) -> &[Vertex] {
        &self.incidences[e * self.k..(e + 1) * self.k]
    }

    pub fn edges(&self) -> std::slice::ChunksExact<'_, Vertex> {
        self.incidences.chunks_exact(self.k)
    }

    /// Multiplicity of `v` in edge `e`.
    pub fn multiplicity(&self, e: usize, v: Vertex) -> u32 {
        self.edge(e).iter().filter(|&&u| u == v).count() as u32
    }

    /// Total multiplicity of every vertex across all edges.
    pub fn degree_sequence(&self) -> Vec<u32> {
        let mut degrees = vec![0u32; self.n];
        for &v in &self.incidences {
            degrees[v as usize] += 1;
        }
        degrees
    }

    pub fn incidence_index(&self) -> IncidenceIndex {
        IncidenceIndex::new(self)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serialises")
    }
}

/// On-disk form: `{"n":…, "k":…, "seed":…, "edges":[[v,…,v],…]}`.
#[derive(Serialize, Deserialize)]
struct HypergraphFile {
    n: usize,
    k: usize,
    #[serde(default)]
    seed: u64,
    edges: Vec<Vec<Vertex>>,
}

impl TryFrom<HypergraphFile> for Hypergraph {
    type Error = Error;

    fn try_from(file: HypergraphFile) -> Result<Self> {
        let mut h = Hypergraph::from_explicit(file.n, file.k, &file.edges)?;
        h.seed = file.seed;
        Ok(h)
    }
}

impl From<Hypergraph> for HypergraphFile {
    fn from(h: Hypergraph) -> Self {
        HypergraphFile {
            n: h.n,
            k: h.k,
            seed: h.seed,
            edges: h.edges().map(<[Vertex]>::to_vec).collect(),
        }
    }
}

/// Vertex-to-edge lookup in CSR layout. An edge containing `v` twice is
/// listed twice under `v`.
#[derive(Clone, Debug)]
pub struct IncidenceIndex {
    offsets: Vec<usize>,
    edges: Vec<u32>,
}

impl IncidenceIndex {
    pub fn new(h: &Hypergraph) -> Self {
        let degrees = h.degree_sequence();
        let mut offsets = Vec::with_capacity(h.n() + 1);
        offsets.push(0);
        for &d in &degrees {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let mut fill = offsets.clone();
        let mut edges = vec![0u32; h.incidences.len()];
        for (e, edge) in h.edges().enumerate() {
            for &v in edge {
                edges[fill[v as usize]] = e as u32;
                fill[v as usize] += 1;
            }
        }
        IncidenceIndex { offsets, edges }
    }

    /// Edges incident to `v`, repeated by multiplicity, in increasing order.
    pub fn edges_at(&self, v: Vertex) -> &[u32] {
        &self.edges[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_edge_list() {
        let h = Hypergraph::sample(10, 0, 3, 42).unwrap();
        assert_eq!(h.m(), 0);
        assert_eq!(h.degree_sequence(), vec![0; 10]);
    }

    #[test]
    fn single_vertex_forces_all_incidences() {
        let h = Hypergraph::sample(1, 2, 3, 7).unwrap();
        assert_eq!(h.edge(0), &[0, 0, 0]);
        assert_eq!(h.edge(1), &[0, 0, 0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(Hypergraph::sample(0, 1, 3, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(Hypergraph::sample(5, 1, 1, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            Hypergraph::from_explicit(2, 3, [[0, 1, 2]]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            Hypergraph::from_explicit(4, 3, [vec![0, 1]]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn explicit_degrees() {
        let h = Hypergraph::from_explicit(3, 3, [[0u32; 3]; 0]).unwrap();
        assert_eq!(h.m(), 0);
        assert_eq!(h.seed(), 0);
        let h = Hypergraph::from_explicit(3, 3, [[0, 0, 1]]).unwrap();
        assert_eq!(h.degree_sequence(), vec![2, 1, 0]);
        assert_eq!(h.multiplicity(0, 0), 2);
        let h = Hypergraph::from_explicit(4, 3, [[0, 1, 2], [1, 2, 3]]).unwrap();
        assert_eq!(h.degree_sequence(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn incidence_index_lists_multiplicities() {
        let h = Hypergraph::from_explicit(3, 3, [[0, 0, 1], [1, 2, 0]]).unwrap();
        let idx = h.incidence_index();
        assert_eq!(idx.edges_at(0), &[0, 0, 1]);
        assert_eq!(idx.edges_at(1), &[0, 1]);
        assert_eq!(idx.edges_at(2), &[1]);
    }

    #[test]
    fn json_shape() {
        let h = Hypergraph::from_explicit(4, 2, [[0, 3], [1, 1]]).unwrap();
        assert_eq!(h.to_json(), r#"{"n":4,"k":2,"seed":0,"edges":[[0,3],[1,1]]}"#);
        let back: Hypergraph = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<Hypergraph>(r#"{"n":2,"k":2,"edges":[[0,5]]}"#).is_err());
    }
}
