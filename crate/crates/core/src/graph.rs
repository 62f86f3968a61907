//! Weighted simple graphs and the directed-edge layer `W₁(G)`.
//!
//! A [`WeightedGraph`] is immutable once built. Vertices are dense indices
//! `0..n` with a label kept for reporting; edges carry strictly positive
//! weights and never form loops or parallel pairs.
//!
//! [`DirectedEdgeSet`] lists both orientations of every edge, ordered by
//! `(tail, head)`, together with the twin map and the prolongation relation
//! `e₁ → e₂` (head of `e₁` is the tail of `e₂`, and `e₂` is not `e₁` reversed).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::numeric::ksum;

/// Relative tolerance used when deciding whether a graph is weight-regular.
pub const DEFAULT_REGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("{}non-positive or non-finite weight {weight}", at(*.line))]
    BadWeight { line: Option<usize>, weight: f64 },
    #[error("{}loop at vertex {label}", at(*.line))]
    Loop { line: Option<usize>, label: String },
    #[error("{}duplicate edge {u} {v}", at(*.line))]
    Duplicate {
        line: Option<usize>,
        u: String,
        v: String,
    },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph has no vertices")]
    Empty,
    #[error("label list has {labels} entries for {vertices} vertices")]
    LabelCount { labels: usize, vertices: usize },
    #[error("duplicate vertex label {0}")]
    DuplicateLabel(String),
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph on `n` vertices labelled `0..n`.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::with_labels((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn with_labels<I>(labels: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = labels.len();
        let mut seen_labels = HashSet::with_capacity(n);
        for l in &labels {
            if !seen_labels.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (a, b, weight) in edges {
            let (u, v) = (a.min(b), a.max(b));
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
            check_edge(&labels, a, b, weight, None, &mut seen)?;
            list.push(Edge { u, v, weight });
        }
        Ok(Self::assemble(labels, list))
    }

    fn assemble(labels: Vec<String>, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); labels.len()];
        for e in &edges {
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(x, _)| x);
        }
        Self {
            labels,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` with edge weights, sorted by neighbour index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let row = self.adjacency.get(u)?;
        row.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| row[i].1)
    }

    /// Combinatorial degree: the number of incident edges.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sum of the weights of the edges incident to `v`.
    pub fn weighted_degree(&self, v: usize) -> Result<f64, GraphError> {
        let row = self
            .adjacency
            .get(v)
            .ok_or(GraphError::VertexOutOfRange(v))?;
        Ok(ksum(row.iter().map(|&(_, w)| w)))
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        self.adjacency
            .iter()
            .map(|row| ksum(row.iter().map(|&(_, w)| w)))
            .collect()
    }

    /// Returns the common weighted degree `w` when every vertex is within
    /// `rel_tol · w` of the mean weighted degree.
    pub fn regularity(&self, rel_tol: f64) -> Option<f64> {
        regularity_of(&self.weighted_degrees(), rel_tol)
    }

    /// `2|E| / |V|`.
    pub fn average_combinatorial_degree(&self) -> Result<f64, GraphError> {
        if self.labels.is_empty() {
            return Err(GraphError::Empty);
        }
        Ok(2.0 * self.edges.len() as f64 / self.labels.len() as f64)
    }

    /// Minimum number of incident edges; 0 for the empty graph.
    pub fn min_combinatorial_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Connected-component index per vertex, numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().iter().all(|&c| c == 0)
    }

    /// The same graph with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GraphError> {
        Self::with_labels(
            self.labels.clone(),
            self.edges.iter().map(|e| (e.u, e.v, e.weight * factor)),
        )
    }

    /// The same graph with weights replaced edge by edge (in `edges()` order).
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self, GraphError> {
        assert_eq!(weights.len(), self.edges.len());
        Self::with_labels(
            self.labels.clone(),
            self.edges.iter().zip(weights).map(|(e, &w)| (e.u, e.v, w)),
        )
    }

    /// Serializes to the edge-list format. Isolated vertices are written as
    /// single-label lines so that parsing restores the same vertex set.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            writeln!(
                out,
                "{} {} {:.16e}",
                self.labels[e.u], self.labels[e.v], e.weight
            )
            .unwrap();
        }
        for (v, row) in self.adjacency.iter().enumerate() {
            if row.is_empty() {
                writeln!(out, "{}", self.labels[v]).unwrap();
            }
        }
        out
    }
}

/// Mean weighted degree if every entry is within `rel_tol` of it.
pub fn regularity_of(degrees: &[f64], rel_tol: f64) -> Option<f64> {
    if degrees.is_empty() {
        return None;
    }
    let w = degrees.iter().sum::<f64>() / degrees.len() as f64;
    if !(w > 0.0) {
        return None;
    }
    degrees
        .iter()
        .all(|&d| (d - w).abs() <= rel_tol * w)
        .then_some(w)
}

fn check_edge(
    labels: &[String],
    a: usize,
    b: usize,
    weight: f64,
    line: Option<usize>,
    seen: &mut HashSet<(usize, usize)>,
) -> Result<(), GraphError> {
    if a == b {
        return Err(GraphError::Loop {
            line,
            label: labels[a].clone(),
        });
    }
    if !(weight.is_finite() && weight > 0.0) {
        return Err(GraphError::BadWeight { line, weight });
    }
    if !seen.insert((a.min(b), a.max(b))) {
        return Err(GraphError::Duplicate {
            line,
            u: labels[a].clone(),
            v: labels[b].clone(),
        });
    }
    Ok(())
}

/// Parses the edge-list format: `<u> <v> <weight>` per line, `#` comments,
/// blank lines ignored. A line holding a single label declares an isolated
/// vertex.
///
/// Labels are mapped to dense indices in numeric order when every label is a
/// non-negative integer and in lexicographic order otherwise, so that a
/// serialized graph parses back with identical indices.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    enum Line<'a> {
        Edge(&'a str, &'a str, f64),
        Vertex(&'a str),
    }
    let mut parsed = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [v] => parsed.push((line, Line::Vertex(v))),
            [u, v, w] => {
                let weight: f64 = w.parse().map_err(|_| GraphError::Malformed {
                    line,
                    msg: format!("cannot parse weight {w:?}"),
                })?;
                parsed.push((line, Line::Edge(u, v, weight)));
            }
            _ => {
                return Err(GraphError::Malformed {
                    line,
                    msg: format!("expected `<u> <v> <weight>`, found {} fields", tokens.len()),
                })
            }
        }
    }

    let mut names: Vec<&str> = Vec::new();
    for (_, l) in &parsed {
        match *l {
            Line::Edge(u, v, _) => names.extend([u, v]),
            Line::Vertex(v) => names.push(v),
        }
    }
    let numeric = names.iter().all(|s| s.parse::<u64>().is_ok());
    if numeric {
        names.sort_by_key(|s| (s.parse::<u64>().unwrap(), s.to_string()));
    } else {
        names.sort_unstable();
    }
    names.dedup();
    let labels: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let index = |s: &str| -> usize {
        if numeric {
            let key = (s.parse::<u64>().unwrap(), s);
            names
                .binary_search_by(|x| (x.parse::<u64>().unwrap(), *x).cmp(&key))
                .unwrap()
        } else {
            names.binary_search(&s).unwrap()
        }
    };

    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line, l) in &parsed {
        if let Line::Edge(u, v, weight) = *l {
            let (a, b) = (index(u), index(v));
            check_edge(&labels, a, b, weight, Some(*line), &mut seen)?;
            edges.push(Edge {
                u: a.min(b),
                v: a.max(b),
                weight,
            });
        }
    }
    Ok(WeightedGraph::assemble(labels, edges))
}

/// One orientation `(tail, head)` of an edge of `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
    pub twin: usize,
}

/// `W₁(G)` with twin and prolongation indices.
#[derive(Debug, Clone)]
pub struct DirectedEdgeSet {
    edges: Vec<DirectedEdge>,
    out_offsets: Vec<usize>,
    prolong_offsets: Vec<usize>,
    prolong_targets: Vec<usize>,
    weighted_degrees: Vec<f64>,
}

impl DirectedEdgeSet {
    pub fn new(g: &WeightedGraph) -> Self {
        let n = g.vertex_count();
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut edges = Vec::with_capacity(2 * g.edge_count());
        out_offsets.push(0);
        for tail in 0..n {
            for &(head, weight) in g.neighbors(tail) {
                edges.push(DirectedEdge {
                    id: edges.len(),
                    tail,
                    head,
                    weight,
                    twin: usize::MAX,
                });
            }
            out_offsets.push(edges.len());
        }
        let find = |edges: &[DirectedEdge], t: usize, h: usize| {
            let out = &edges[out_offsets[t]..out_offsets[t + 1]];
            out_offsets[t] + out.binary_search_by_key(&h, |e| e.head).unwrap()
        };
        for i in 0..edges.len() {
            edges[i].twin = find(&edges, edges[i].head, edges[i].tail);
        }
        let mut prolong_offsets = Vec::with_capacity(edges.len() + 1);
        let mut prolong_targets = Vec::new();
        prolong_offsets.push(0);
        for e in &edges {
            prolong_targets
                .extend((out_offsets[e.head]..out_offsets[e.head + 1]).filter(|&x| x != e.twin));
            prolong_offsets.push(prolong_targets.len());
        }
        Self {
            edges,
            out_offsets,
            prolong_offsets,
            prolong_targets,
            weighted_degrees: g.weighted_degrees(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &DirectedEdge {
        &self.edges[id]
    }

    /// Ids of edges with tail `v`, ordered by head.
    pub fn out_edges(&self, v: usize) -> Range<usize> {
        self.out_offsets[v]..self.out_offsets[v + 1]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.weighted_degrees[v]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.weighted_degrees
    }

    /// Sorted ids of the edges prolonging `e`.
    pub fn prolongations(&self, e: usize) -> &[usize] {
        &self.prolong_targets[self.prolong_offsets[e]..self.prolong_offsets[e + 1]]
    }

    /// Offset of `e`'s prolongation list in the flat prolongation array.
    pub fn prolongation_offset(&self, e: usize) -> usize {
        self.prolong_offsets[e]
    }

    /// Total number of pairs `e₁ → e₂`.
    pub fn prolongation_count(&self) -> usize {
        self.prolong_targets.len()
    }

    pub fn find(&self, tail: usize, head: usize) -> Option<usize> {
        if tail >= self.vertex_count() {
            return None;
        }
        let range = self.out_edges(tail);
        self.edges[range.clone()]
            .binary_search_by_key(&head, |e| e.head)
            .ok()
            .map(|i| range.start + i)
    }

    /// Position of `to` within `from`'s prolongation list.
    pub fn prolongation_slot(&self, from: usize, to: usize) -> Option<usize> {
        self.prolongations(from).binary_search(&to).ok()
    }

    pub fn prolongs(&self, from: usize, to: usize) -> bool {
        self.prolongation_slot(from, to).is_some()
    }
}

/// Directed edges of `g` with twin and prolongation indices.
pub fn directed_edges(g: &WeightedGraph) -> DirectedEdgeSet {
    DirectedEdgeSet::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
    }

    fn cycle(n: usize) -> WeightedGraph {
        unit(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn complete(n: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        unit(n, &e)
    }

    #[test]
    fn parse_smallest_input() {
        let g = parse_graph("0 1 1.0\n1 2 2.0").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight(1, 2), Some(2.0));
    }

    #[test]
    fn parse_rejects_loop_and_duplicate() {
        assert!(matches!(
            parse_graph("0 0 1.0"),
            Err(GraphError::Loop { line: Some(1), .. })
        ));
        assert!(matches!(
            parse_graph("0 1 1.0\n1 0 2.0"),
            Err(GraphError::Duplicate { line: Some(2), .. })
        ));
    }

    #[test]
    fn parse_rejects_bad_lines_and_weights() {
        assert!(matches!(
            parse_graph("0 1"),
            Err(GraphError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_graph("# c\n\n0 1 x"),
            Err(GraphError::Malformed { line: 3, .. })
        ));
        assert!(matches!(
            parse_graph("0 1 0.0"),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            parse_graph("0 1 -2"),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            parse_graph("0 1 inf"),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            parse_graph("0 1 NaN"),
            Err(GraphError::BadWeight { .. })
        ));
    }

    #[test]
    fn parse_comments_and_string_labels() {
        let g = parse_graph("# header\nb a 1.5 # trailing\n\nc b 2\n").unwrap();
        assert_eq!(g.labels(), ["a", "b", "c"]);
        assert_eq!(g.weighted_degree(1).unwrap(), 3.5);
    }

    #[test]
    fn numeric_labels_keep_numeric_order() {
        let g = parse_graph("10 2 1\n2 9 1").unwrap();
        assert_eq!(g.labels(), ["2", "9", "10"]);
    }

    #[test]
    fn weighted_degree_examples() {
        let t = cycle(3);
        for v in 0..3 {
            assert_eq!(t.weighted_degree(v).unwrap(), 2.0);
        }
        let p = WeightedGraph::new(3, [(0, 1, 1.5), (1, 2, 2.5)]).unwrap();
        assert_eq!(p.weighted_degree(1).unwrap(), 4.0);
        let iso = WeightedGraph::new(2, []).unwrap();
        assert_eq!(iso.weighted_degree(0).unwrap(), 0.0);
        assert_eq!(p.weighted_degree(3), Err(GraphError::VertexOutOfRange(3)));
    }

    #[test]
    fn regularity_examples() {
        assert_eq!(cycle(5).regularity(DEFAULT_REGULARITY_TOL), Some(2.0));
        assert_eq!(unit(3, &[(0, 1), (1, 2)]).regularity(1e-9), None);
        assert_eq!(complete(4).regularity(1e-9), Some(3.0));
    }

    #[test]
    fn degree_statistics() {
        assert_eq!(complete(4).average_combinatorial_degree().unwrap(), 3.0);
        assert_eq!(cycle(10).average_combinatorial_degree().unwrap(), 2.0);
        let star = unit(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(star.average_combinatorial_degree().unwrap(), 8.0 / 5.0);
        assert_eq!(
            WeightedGraph::new(0, [])
                .unwrap()
                .average_combinatorial_degree(),
            Err(GraphError::Empty)
        );
        assert_eq!(cycle(5).min_combinatorial_degree(), 2);
        assert_eq!(unit(3, &[(0, 1), (1, 2)]).min_combinatorial_degree(), 1);
        assert_eq!(unit(2, &[(0, 1)]).min_combinatorial_degree(), 1);
    }

    #[test]
    fn directed_edge_examples() {
        let t = directed_edges(&cycle(3));
        assert_eq!(t.len(), 6);
        assert!((0..6).all(|e| t.prolongations(e).len() == 1));

        let k4 = directed_edges(&complete(4));
        assert_eq!(k4.len(), 12);
        assert!((0..12).all(|e| k4.prolongations(e).len() == 2));

        let p3 = directed_edges(&unit(3, &[(0, 1), (1, 2)]));
        let e01 = p3.find(0, 1).unwrap();
        let e12 = p3.find(1, 2).unwrap();
        assert_eq!(p3.prolongations(e01), [e12]);
    }

    #[test]
    fn directed_edges_sorted_with_twins() {
        let d = directed_edges(&complete(5));
        for w in d.edges().windows(2) {
            assert!((w[0].tail, w[0].head) < (w[1].tail, w[1].head));
        }
        for e in d.edges() {
            let t = d.edge(e.twin);
            assert_ne!(e.twin, e.id);
            assert_eq!(t.twin, e.id);
            assert_eq!((t.tail, t.head, t.weight), (e.head, e.tail, e.weight));
        }
    }

    #[test]
    fn serialize_round_trip_with_isolated_vertex() {
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (1, 2, 1.0 / 3.0)]).unwrap();
        let back = parse_graph(&g.to_edge_list()).unwrap();
        assert_eq!(back, g);
    }
}
