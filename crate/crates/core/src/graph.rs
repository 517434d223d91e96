//! Simple undirected graphs, the edge-list format, and instance generators.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;

/// Immutable simple graph on vertices `0..n`.
///
/// Neighbor lists are sorted ascending, which fixes every "in fixed order"
/// iteration used by the sampler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    max_degree: usize,
}

impl Graph {
    /// Build from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if let Some(message) = edge_problem(n, u, v, &mut seen) {
                return Err(GraphError::InvalidParameters(format!("edge {i}: {message}")));
            }
        }
        Ok(Self::build(n, edges.to_vec()))
    }

    fn build(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Self {
            n,
            edges,
            adjacency,
            max_degree,
        }
    }

    /// Parse the `n m` header followed by `m` lines `u v`.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header \"n m\"".into(),
        })?;
        let [n, m] = parse_pair(header_line, header)?;
        let mut seen = HashSet::with_capacity(m);
        let mut edges = Vec::with_capacity(m);
        for (line, content) in lines {
            if edges.len() == m {
                return Err(GraphError::Parse {
                    line,
                    message: format!("more than the {m} declared edges"),
                });
            }
            let [u, v] = parse_pair(line, content)?;
            if let Some(message) = edge_problem(n, u, v, &mut seen) {
                return Err(GraphError::Parse { line, message });
            }
            edges.push((u, v));
        }
        if edges.len() < m {
            return Err(GraphError::Parse {
                line: text.lines().count() + 1,
                message: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        Ok(Self::build(n, edges))
    }

    /// Inverse of [`Graph::parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn empty(n: usize) -> Self {
        Self::build(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::build(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidParameters(format!("cycle needs n >= 3, got {n}")));
        }
        Ok(Self::build(n, (0..n).map(|i| (i, (i + 1) % n)).collect()))
    }

    pub fn path(n: usize) -> Self {
        Self::build(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// `K_{d,d}` with parts `0..d` and `d..2d`.
    pub fn complete_bipartite(d: usize) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::InvalidParameters("bipartite degree must be >= 1".into()));
        }
        let edges = (0..d)
            .flat_map(|u| (d..2 * d).map(move |v| (u, v)))
            .collect();
        Ok(Self::build(2 * d, edges))
    }

    /// Disjoint union of `copies` copies of `self`, relabelled block by block.
    pub fn disjoint_copies(&self, copies: usize) -> Self {
        let edges = (0..copies)
            .flat_map(|c| {
                let off = c * self.n;
                self.edges.iter().map(move |&(u, v)| (u + off, v + off))
            })
            .collect();
        Self::build(self.n * copies, edges)
    }

    /// Uniform-ish simple `d`-regular graph from the pairing model.
    ///
    /// Points are matched one pair at a time; a pair that would create a loop
    /// or a parallel edge is redrawn, and the whole matching restarts only when
    /// no valid pair can be found. Deterministic in `seed`.
    pub fn random_regular(
        n: usize,
        d: usize,
        seed: u64,
        max_restarts: usize,
    ) -> Result<Self, GraphError> {
        if (n * d) % 2 == 1 {
            return Err(GraphError::InvalidParameters(format!("n*d = {} is odd", n * d)));
        }
        if d >= n && !(n == 0 && d == 0) {
            return Err(GraphError::InvalidParameters(format!(
                "degree {d} must be smaller than n = {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..=max_restarts {
            if let Some(edges) = try_pairing(n, d, &mut rng) {
                return Ok(Self::build(n, edges));
            }
        }
        Err(GraphError::GenerationFailed {
            n,
            degree: d,
            attempts: max_restarts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Checks symmetry, simplicity and the cached maximum degree.
    pub fn audit(&self) -> bool {
        let symmetric = (0..self.n).all(|v| {
            self.adjacency[v]
                .windows(2)
                .all(|w| w[0] < w[1])
                && self.adjacency[v]
                    .iter()
                    .all(|&u| u != v && self.adjacency[u].binary_search(&v).is_ok())
        });
        let degree_sum: usize = self.adjacency.iter().map(Vec::len).sum();
        let max = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        symmetric && degree_sum == 2 * self.edges.len() && max == self.max_degree
    }
}

fn parse_pair(line: usize, content: &str) -> Result<[usize; 2], GraphError> {
    let fields: Vec<&str> = content.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Parse {
            line,
            message: format!("expected two integers, found {:?}", content),
        });
    }
    let mut out = [0; 2];
    for (slot, field) in out.iter_mut().zip(&fields) {
        *slot = field.parse().map_err(|_| GraphError::Parse {
            line,
            message: format!("{field:?} is not a nonnegative integer"),
        })?;
    }
    Ok(out)
}

fn edge_problem(
    n: usize,
    u: usize,
    v: usize,
    seen: &mut HashSet<(usize, usize)>,
) -> Option<String> {
    if u >= n || v >= n {
        return Some(format!("vertex out of range in edge ({u}, {v}) for n = {n}"));
    }
    if u == v {
        return Some(format!("self-loop at vertex {u}"));
    }
    if !seen.insert((u.min(v), u.max(v))) {
        return Some(format!("duplicate edge ({u}, {v})"));
    }
    None
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = HashSet::with_capacity(n * d / 2);
    let mut edges = Vec::with_capacity(n * d / 2);
    while !points.is_empty() {
        let len = points.len();
        let mut placed = false;
        for _ in 0..(4 * len).max(64) {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            let (u, v) = (points[i], points[j]);
            if i == j || u == v || seen.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            seen.insert((u.min(v), u.max(v)));
            edges.push((u, v));
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle_and_k4() {
        let g = Graph::parse_edge_list("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.num_edges(), 3);
        let k4 = Graph::parse_edge_list("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3").unwrap();
        assert_eq!(k4, Graph::complete(4));
        assert_eq!(k4.max_degree(), 3);
        assert!(k4.audit());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Graph::parse_edge_list("2 1\n0 0").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, ref message } if message.contains("self-loop")));
        let err = Graph::parse_edge_list("3 2\n0 1\n1 0").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, ref message } if message.contains("duplicate")));
        let err = Graph::parse_edge_list("3 1\n0 7").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = Graph::parse_edge_list("3 1\n0 x").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        assert!(Graph::parse_edge_list("3 2\n0 1").is_err());
        assert!(Graph::parse_edge_list("").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let g = Graph::complete_bipartite(3).unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn bipartite_counts() {
        let g = Graph::complete_bipartite(3).unwrap();
        assert_eq!((g.n(), g.num_edges()), (6, 9));
        assert!((0..6).all(|v| g.degree(v) == 3));
        let g = Graph::complete_bipartite(1).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(Graph::complete_bipartite(6).unwrap().num_edges(), 36);
        assert!(Graph::complete_bipartite(0).is_err());
    }

    #[test]
    fn random_regular_degrees_and_determinism() {
        let g = Graph::random_regular(8, 3, 1, 100).unwrap();
        assert!(g.audit());
        assert!((0..8).all(|v| g.degree(v) == 3));
        assert_eq!(g, Graph::random_regular(8, 3, 1, 100).unwrap());
        assert!(matches!(
            Graph::random_regular(5, 3, 1, 100),
            Err(GraphError::InvalidParameters(_))
        ));
        assert_eq!(Graph::random_regular(4, 3, 9, 100).unwrap(), Graph::complete(4));
    }

    #[test]
    fn random_regular_dense_instances() {
        for &(n, d) in &[(200, 8), (100, 24), (60, 30)] {
            let g = Graph::random_regular(n, d, 3, 100).unwrap();
            assert!(g.audit());
            assert!((0..n).all(|v| g.degree(v) == d));
        }
    }
}
