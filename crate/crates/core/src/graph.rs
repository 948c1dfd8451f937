//! Finite simple graphs: the fixed pattern `H` whose density is constrained.
//!
//! Vertices are `0..v`; edges are stored as `(min, max)` pairs in sorted
//! order, so every enumeration over `E(H)` is deterministic.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops, repeated edges and
    /// out-of-range endpoints are rejected.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidGraph(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {vertices} vertices"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(Error::InvalidGraph("repeated edge".into()));
        }
        Ok(Self {
            vertices,
            edges: canon,
        })
    }

    /// Complete graph `K_t`.
    pub fn complete(t: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidGraph(format!("K_{t} needs t >= 2")));
        }
        let edges = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j)));
        Self::new(t, edges)
    }

    /// Cycle `C_t`.
    pub fn cycle(t: usize) -> Result<Self> {
        if t < 3 {
            return Err(Error::InvalidGraph(format!("C_{t} needs t >= 3")));
        }
        Self::new(t, (0..t).map(|i| (i, (i + 1) % t)))
    }

    /// Path `P_t` on `t` vertices.
    pub fn path(t: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidGraph(format!("P_{t} needs t >= 2")));
        }
        Self::new(t, (0..t - 1).map(|i| (i, i + 1)))
    }

    /// Star `K_{1,t}`; vertex 0 is the centre.
    pub fn star(t: usize) -> Result<Self> {
        if t < 1 {
            return Err(Error::InvalidGraph("star needs t >= 1 leaves".into()));
        }
        Self::new(t + 1, (1..=t).map(|i| (0, i)))
    }

    /// Complete bipartite `K_{s,t}`.
    pub fn complete_bipartite(s: usize, t: usize) -> Result<Self> {
        if s < 1 || t < 1 {
            return Err(Error::InvalidGraph(format!(
                "K_{{{s},{t}}} needs s, t >= 1"
            )));
        }
        let edges = (0..s).flat_map(|i| (0..t).map(move |j| (i, s + j)));
        Self::new(s + t, edges)
    }

    /// Parses the edge-list text format: one `u v` pair per line. Blank lines
    /// and lines starting with `#` are skipped. The vertex count is one more
    /// than the largest label.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut max_label = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|s| s.parse().ok()).ok_or_else(|| {
                    Error::InvalidGraph(format!("line {}: expected `u v`", lineno + 1))
                })
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::InvalidGraph(format!(
                    "line {}: expected exactly two fields",
                    lineno + 1
                )));
            }
            max_label = Some(max_label.unwrap_or(0).max(u).max(v));
            edges.push((u, v));
        }
        let n = max_label
            .map(|m| m + 1)
            .ok_or_else(|| Error::InvalidGraph("empty edge list".into()))?;
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges
            .iter()
            .map(|(u, v)| format!("{u} {v}\n"))
            .collect()
    }

    /// `v(H)`.
    pub fn v(&self) -> usize {
        self.vertices
    }

    /// `e(H)`.
    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, u: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == u || b == u)
            .count()
    }

    /// Maximum degree `Δ(H)`.
    pub fn max_degree(&self) -> usize {
        (0..self.vertices)
            .map(|u| self.degree(u))
            .max()
            .unwrap_or(0)
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// True iff `H` has no odd cycle (BFS 2-colouring of every component).
    pub fn is_bipartite(&self) -> bool {
        let adj: Vec<Vec<usize>> = (0..self.vertices).map(|u| self.neighbors(u)).collect();
        let mut colour = vec![None; self.vertices];
        let mut queue = VecDeque::new();
        for start in 0..self.vertices {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap();
                for &w in &adj[u] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }
}

/// Named graph families: `complete`, `cycle`, `path`, `star`.
pub fn graph_library(name: &str, size: usize) -> Result<Graph> {
    match name {
        "complete" | "K" => Graph::complete(size),
        "cycle" | "C" => Graph::cycle(size),
        "path" | "P" => Graph::path(size),
        "star" | "S" => Graph::star(size),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

/// Compact names: `K3`, `C5`, `P4`, `S2` (star `K_{1,2}`), `K2,3`, or the
/// long form `complete:3`.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, size)) = s.split_once(':') {
            let size = size
                .parse()
                .map_err(|_| Error::UnknownFamily(s.to_string()))?;
            return graph_library(name, size);
        }
        let (head, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        if head == "K" {
            if let Some((a, b)) = rest.split_once(',') {
                let a = a.parse().map_err(|_| Error::UnknownFamily(s.to_string()))?;
                let b = b.parse().map_err(|_| Error::UnknownFamily(s.to_string()))?;
                return Graph::complete_bipartite(a, b);
            }
        }
        let size = rest
            .parse()
            .map_err(|_| Error::UnknownFamily(s.to_string()))?;
        graph_library(head, size)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(v={}, e={}; ", self.vertices, self.e())?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartiteness_of_small_families() {
        assert!(!Graph::complete(3).unwrap().is_bipartite());
        assert!(Graph::cycle(4).unwrap().is_bipartite());
        assert!(!Graph::cycle(5).unwrap().is_bipartite());
        assert!(Graph::complete_bipartite(2, 3).unwrap().is_bipartite());
        assert!(Graph::path(6).unwrap().is_bipartite());
    }

    #[test]
    fn library_shapes() {
        let k3 = graph_library("complete", 3).unwrap();
        assert_eq!((k3.v(), k3.e(), k3.max_degree()), (3, 3, 2));
        let c5 = graph_library("cycle", 5).unwrap();
        assert_eq!(c5.max_degree(), 2);
        let s2 = graph_library("star", 2).unwrap();
        assert_eq!((s2.v(), s2.e()), (3, 2));
    }

    #[test]
    fn library_errors() {
        assert!(matches!(
            graph_library("wheel", 5),
            Err(Error::UnknownFamily(_))
        ));
        assert!(graph_library("complete", 1).is_err());
        assert!(graph_library("cycle", 2).is_err());
    }

    #[test]
    fn rejects_loops_and_repeats() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn compact_names() {
        assert_eq!("K3".parse::<Graph>().unwrap(), Graph::complete(3).unwrap());
        assert_eq!(
            "K2,3".parse::<Graph>().unwrap(),
            Graph::complete_bipartite(2, 3).unwrap()
        );
        assert_eq!(
            "cycle:5".parse::<Graph>().unwrap(),
            Graph::cycle(5).unwrap()
        );
        assert_eq!("S2".parse::<Graph>().unwrap(), Graph::star(2).unwrap());
        assert!("Q7".parse::<Graph>().is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::cycle(5).unwrap();
        let text = g.to_edge_list();
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
        let with_comments = "# triangle\n0 1\n\n1 2\n2 0\n";
        assert_eq!(
            Graph::from_edge_list(with_comments).unwrap(),
            Graph::complete(3).unwrap()
        );
        assert!(Graph::from_edge_list("0 1 2\n").is_err());
        assert!(Graph::from_edge_list("").is_err());
    }

    #[test]
    fn disconnected_graphs_are_allowed() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(g.is_bipartite());
        assert_eq!(g.max_degree(), 1);
    }
}
