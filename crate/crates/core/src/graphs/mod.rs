//! Simple graphs, party-colored graphs and the predicates used by the
//! contextuality and UPB analyses.

mod field;
mod iso;
mod mis;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{is_odd_prime, paley, quadratic_residues, GaloisField};
pub use iso::{colored_equivalence, isomorphism, MAX_EQUIVALENCE_VERTICES};
pub(crate) use iso::backtrack as backtrack_map;
pub use mis::{clique_number, independence_number, maximum_independent_set, MAX_MIS_VERTICES};

/// Undirected simple graph on vertices `0..n`.
///
/// Serializes as `{"n": int, "edges": [[i, j], ...]}` with `i < j`, edges in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        let mut g = Graph::empty(raw.n);
        for (i, j) in raw.edges {
            if i >= j {
                return Err(Error::Invalid(format!("edge [{i}, {j}] must satisfy i < j")));
            }
            if !g.add_edge(i, j)? {
                return Err(Error::Invalid(format!("duplicate edge [{i}, {j}]")));
            }
        }
        Ok(g)
    }
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Inserts `{i, j}`; returns false if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::Invalid(format!("self-loop at vertex {i}")));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!("edge [{i}, {j}] out of range for n = {}", self.n)));
        }
        Ok(self.edges.insert(key(i, j)))
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        self.edges.remove(&key(i, j))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&key(i, j))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_edge(u, v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.degrees().iter().all(|&d| d == k)
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(None)
    }

    fn is_connected_without(&self, removed: Option<usize>) -> bool {
        let adj = self.adjacency_lists();
        let alive = self.n - usize::from(removed.is_some());
        let Some(start) = (0..self.n).find(|&v| Some(v) != removed) else {
            return true;
        };
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] && Some(u) != removed {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == alive
    }

    /// Connected with at least three vertices and no cut vertex.
    pub fn is_biconnected(&self) -> bool {
        self.n >= 3 && self.is_connected() && (0..self.n).all(|v| self.is_connected_without(Some(v)))
    }

    /// Union of edge sets; both graphs must have the same order.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut g = self.clone();
        g.edges.extend(other.edges.iter().copied());
        Ok(g)
    }

    /// Graph with vertex `v` of `self` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| key(perm[a], perm[b])).collect(),
        }
    }
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::BadOrder(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            g.edges.insert((i, j));
        }
    }
    g
}

pub fn complement(g: &Graph) -> Graph {
    let mut out = Graph::empty(g.n);
    for i in 0..g.n {
        for j in i + 1..g.n {
            if !g.edges.contains(&(i, j)) {
                out.edges.insert((i, j));
            }
        }
    }
    out
}

/// True iff `g` is a single cycle through all of its vertices, i.e.
/// 2-regular and 2-connected.
pub fn is_cycle(g: &Graph) -> bool {
    g.n >= 3 && g.is_regular(2) && g.is_biconnected()
}

/// Complete graph whose edges carry the set of parties realizing each
/// orthogonality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoredGraph {
    n: usize,
    colors: BTreeMap<(usize, usize), BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ColoredEdge {
    edge: (usize, usize),
    parties: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawColored {
    n: usize,
    edges: Vec<ColoredEdge>,
}

impl Serialize for EdgeColoredGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawColored {
            n: self.n,
            edges: self
                .colors
                .iter()
                .map(|(&edge, parties)| ColoredEdge {
                    edge,
                    parties: parties.iter().copied().collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeColoredGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawColored::deserialize(d)?;
        let mut g = EdgeColoredGraph::new(raw.n);
        for e in raw.edges {
            for p in e.parties {
                g.add_color(e.edge.0, e.edge.1, p).map_err(serde::de::Error::custom)?;
            }
        }
        Ok(g)
    }
}

impl EdgeColoredGraph {
    pub fn new(n: usize) -> Self {
        EdgeColoredGraph {
            n,
            colors: BTreeMap::new(),
        }
    }

    pub fn add_color(&mut self, i: usize, j: usize, party: usize) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!("bad colored edge [{i}, {j}] for n = {}", self.n)));
        }
        self.colors.entry(key(i, j)).or_default().insert(party);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Parties coloring `{i, j}`; empty when the pair is uncolored.
    pub fn color(&self, i: usize, j: usize) -> Option<&BTreeSet<usize>> {
        self.colors.get(&key(i, j))
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &BTreeSet<usize>)> {
        self.colors.iter().map(|(&k, v)| (k, v))
    }

    /// Uncolored graph of all edges that carry any color.
    pub fn support(&self) -> Graph {
        Graph {
            n: self.n,
            edges: self.colors.keys().copied().collect(),
        }
    }

    /// Edges colored by `party`.
    pub fn party_graph(&self, party: usize) -> Graph {
        Graph {
            n: self.n,
            edges: self
                .colors
                .iter()
                .filter(|(_, p)| p.contains(&party))
                .map(|(&k, _)| k)
                .collect(),
        }
    }

    /// Builds a colored graph from per-party graphs on a shared vertex set;
    /// party ids are the slice positions.
    pub fn from_party_graphs(graphs: &[Graph]) -> Result<Self> {
        let n = graphs.first().map(|g| g.n).unwrap_or(0);
        let mut out = EdgeColoredGraph::new(n);
        for (party, g) in graphs.iter().enumerate() {
            if g.n != n {
                return Err(Error::SizeMismatch { left: n, right: g.n });
            }
            for (i, j) in g.edges() {
                out.add_color(i, j, party)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(cycle(3).unwrap(), complete(3));
        assert_eq!(cycle(5).unwrap().edge_count(), 5);
        assert!(matches!(cycle(2), Err(Error::BadOrder(_))));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&complete(6)).edge_count(), 0);
        let c7 = complement(&cycle(7).unwrap());
        assert_eq!(c7.edge_count(), 21 - 7);
        assert!(c7.is_regular(4));
        assert_eq!(complement(&c7), cycle(7).unwrap());
    }

    #[test]
    fn is_cycle_examples() {
        assert!(is_cycle(&cycle(7).unwrap()));
        let t = triangles();
        assert!(t.is_regular(2));
        assert!(!is_cycle(&t));
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!is_cycle(&path));
        for n in 3..12 {
            let mut g = cycle(n).unwrap();
            assert!(is_cycle(&g));
            g.remove_edge(0, 1);
            assert!(!is_cycle(&g));
        }
    }

    #[test]
    fn graph_json_layout() {
        let g = Graph::from_edges(4, [(2, 1), (0, 3), (0, 1)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":4,"edges":[[0,1],[0,3],[1,2]]}"#);
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[0,1],[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[0,3]]}"#).is_err());
    }

    #[test]
    fn colored_graph_views() {
        let c5 = cycle(5).unwrap();
        let g = EdgeColoredGraph::from_party_graphs(&[c5.clone(), complement(&c5)]).unwrap();
        assert_eq!(g.support(), complete(5));
        assert_eq!(g.party_graph(0), c5);
        assert_eq!(g.color(1, 0).unwrap().iter().copied().collect::<Vec<_>>(), vec![0]);
        let s = serde_json::to_string(&g).unwrap();
        let back: EdgeColoredGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
