//! Balls in `G` and in its universal cover.
//!
//! An [`UnraveledBall`] is the tree of all non-backtracking walks of length at
//! most `r` starting at a vertex, stored as a parent array in breadth-first
//! order. Each non-root node records the directed edge that extends its
//! parent's walk.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::graph::{DirectedEdgeSet, GraphError, WeightedGraph};
use crate::spectra::SymmetricOperator;

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("vertex {0} out of range")]
    InvalidVertex(usize),
    #[error(
        "node budget {budget} exceeded: levels 0..={level} fit, radius {radius} needs {projected:.0} nodes"
    )]
    BudgetExceeded {
        budget: usize,
        level: usize,
        radius: usize,
        projected: f64,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub depth: usize,
    /// Directed edge of `G` extending the parent's walk; `None` at the root.
    pub edge: Option<usize>,
    /// Weight of the extending edge; 0 at the root.
    pub weight: f64,
    /// Last vertex of the walk.
    pub vertex: usize,
}

/// The tree `G̃(v, r)`.
#[derive(Debug, Clone)]
pub struct UnraveledBall {
    center: usize,
    radius: usize,
    nodes: Vec<TreeNode>,
    level_offsets: Vec<usize>,
    max_weighted_degree: f64,
}

impl UnraveledBall {
    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node indices at depth `i`.
    pub fn level(&self, i: usize) -> std::ops::Range<usize> {
        self.level_offsets[i]..self.level_offsets[i + 1]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.level_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The walk from the center ending at `node`, as a vertex sequence.
    pub fn walk(&self, node: usize) -> Vec<usize> {
        let mut walk = Vec::with_capacity(self.nodes[node].depth + 1);
        let mut cur = Some(node);
        while let Some(i) = cur {
            walk.push(self.nodes[i].vertex);
            cur = self.nodes[i].parent;
        }
        walk.reverse();
        walk
    }

    /// Tree edges as `(parent, child, weight)`, in child order.
    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (p, i, n.weight)))
    }
}

impl SymmetricOperator for UnraveledBall {
    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let p = n.parent.unwrap();
            y[i] += n.weight * x[p];
            y[p] += n.weight * x[i];
        }
    }

    fn norm_bound(&self) -> f64 {
        self.max_weighted_degree
    }
}

/// Number of non-backtracking walks of each length `0..=r` from `v`,
/// computed by dynamic programming over directed edges. Counts are in `f64`
/// so that sizes far beyond any budget stay representable.
pub fn walk_level_sizes(edges: &DirectedEdgeSet, v: usize, r: usize) -> Vec<f64> {
    let mut sizes = vec![1.0];
    if r == 0 {
        return sizes;
    }
    let mut count = vec![0.0f64; edges.len()];
    for e in edges.out_edges(v) {
        count[e] = 1.0;
    }
    sizes.push(count.iter().sum());
    for _ in 2..=r {
        let mut next = vec![0.0f64; edges.len()];
        for (e, &c) in count.iter().enumerate() {
            if c > 0.0 {
                for &f in edges.prolongations(e) {
                    next[f] += c;
                }
            }
        }
        count = next;
        sizes.push(count.iter().sum());
    }
    sizes
}

/// Builds `G̃(v, r)` breadth-first, children ordered by extending-edge id.
/// Fails before allocating when the projected node count exceeds `budget`.
pub fn unravel(
    edges: &DirectedEdgeSet,
    v: usize,
    r: usize,
    budget: usize,
) -> Result<UnraveledBall, CoverError> {
    if v >= edges.vertex_count() {
        return Err(CoverError::InvalidVertex(v));
    }
    let sizes = walk_level_sizes(edges, v, r);
    let mut total = 0.0;
    let mut fits = 0;
    for (i, &s) in sizes.iter().enumerate() {
        total += s;
        if total <= budget as f64 {
            fits = i;
        }
    }
    if total > budget as f64 {
        return Err(CoverError::BudgetExceeded {
            budget,
            level: fits,
            radius: r,
            projected: total,
        });
    }

    let mut nodes = Vec::with_capacity(total as usize);
    nodes.push(TreeNode {
        parent: None,
        depth: 0,
        edge: None,
        weight: 0.0,
        vertex: v,
    });
    let mut level_offsets = vec![0, 1];
    for depth in 1..=r {
        let parents = level_offsets[depth - 1]..level_offsets[depth];
        for p in parents {
            let children: &[usize] = match nodes[p].edge {
                None => {
                    let range = edges.out_edges(v);
                    for e in range {
                        push_child(&mut nodes, edges, p, depth, e);
                    }
                    continue;
                }
                Some(e) => edges.prolongations(e),
            };
            for &e in children {
                push_child(&mut nodes, edges, p, depth, e);
            }
        }
        level_offsets.push(nodes.len());
    }
    let max_weighted_degree = (0..edges.vertex_count())
        .map(|x| edges.weighted_degree(x))
        .fold(0.0, f64::max);
    Ok(UnraveledBall {
        center: v,
        radius: r,
        nodes,
        level_offsets,
        max_weighted_degree,
    })
}

fn push_child(
    nodes: &mut Vec<TreeNode>,
    edges: &DirectedEdgeSet,
    parent: usize,
    depth: usize,
    e: usize,
) {
    let de = edges.edge(e);
    nodes.push(TreeNode {
        parent: Some(parent),
        depth,
        edge: Some(e),
        weight: de.weight,
        vertex: de.head,
    });
}

/// An induced subgraph of `G`: `graph` is indexed locally, `vertices[i]` is
/// the vertex of `G` behind local index `i` (sorted ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct InducedSubgraph {
    pub vertices: Vec<usize>,
    pub graph: WeightedGraph,
}

impl InducedSubgraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn local_index(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.local_index(v).is_some()
    }

    /// The whole graph viewed as an induced subgraph of itself.
    pub fn whole(g: &WeightedGraph) -> Self {
        Self {
            vertices: (0..g.vertex_count()).collect(),
            graph: g.clone(),
        }
    }
}

impl SymmetricOperator for InducedSubgraph {
    fn dim(&self) -> usize {
        self.graph.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.graph.apply(x, y)
    }

    fn norm_bound(&self) -> f64 {
        self.graph.norm_bound()
    }
}

/// Induced subgraph of `g` on `keep` (indexed by vertex of `g`).
pub fn induced(g: &WeightedGraph, keep: &[bool]) -> InducedSubgraph {
    let vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| keep[v]).collect();
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let labels = vertices.iter().map(|&v| g.label(v).to_string()).collect();
    let edges = g
        .edges()
        .iter()
        .filter(|e| keep[e.u] && keep[e.v])
        .map(|e| (local[e.u], local[e.v], e.weight));
    let graph = WeightedGraph::with_labels(labels, edges)
        .expect("induced subgraph of a valid graph is valid");
    InducedSubgraph { vertices, graph }
}

/// Unweighted BFS distances from `v`; `usize::MAX` when unreachable.
pub fn distances(g: &WeightedGraph, v: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[v] = 0;
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// `G(v, r)`: the subgraph induced on vertices within distance `r` of `v`.
pub fn ball(g: &WeightedGraph, v: usize, r: usize) -> Result<InducedSubgraph, CoverError> {
    if v >= g.vertex_count() {
        return Err(CoverError::InvalidVertex(v));
    }
    let dist = distances(g, v);
    Ok(induced(
        g,
        &dist.iter().map(|&d| d <= r).collect::<Vec<_>>(),
    ))
}

/// `G ∖ G(v, r+1)`: the subgraph induced on vertices at distance `> r + 1`.
pub fn residual(g: &WeightedGraph, v: usize, r: usize) -> Result<InducedSubgraph, CoverError> {
    if v >= g.vertex_count() {
        return Err(CoverError::InvalidVertex(v));
    }
    let dist = distances(g, v);
    Ok(induced(
        g,
        &dist
            .iter()
            .map(|&d| d == usize::MAX || d > r + 1)
            .collect::<Vec<_>>(),
    ))
}

/// Vertex ids of the `theta`-core of `G \ G(v, r+1)`, sorted.
///
/// Same result as `peel_core(&residual(g, v, r)?, theta).vertices`, computed on
/// a mask over `g` without materializing the subgraphs.
pub fn residual_core(
    g: &WeightedGraph,
    v: usize,
    r: usize,
    theta: f64,
) -> Result<Vec<usize>, CoverError> {
    if v >= g.vertex_count() {
        return Err(CoverError::InvalidVertex(v));
    }
    let dist = distances(g, v);
    let mut alive: Vec<bool> = dist.iter().map(|&d| d == usize::MAX || d > r + 1).collect();
    let n = g.vertex_count();
    let mut degree = vec![0.0; n];
    let mut stack = Vec::new();
    loop {
        for u in 0..n {
            if alive[u] {
                degree[u] = g
                    .neighbors(u)
                    .iter()
                    .filter(|&&(x, _)| alive[x])
                    .map(|&(_, w)| w)
                    .sum();
                if degree[u] < theta {
                    stack.push(u);
                }
            }
        }
        if stack.is_empty() {
            break;
        }
        while let Some(u) = stack.pop() {
            if !alive[u] {
                continue;
            }
            alive[u] = false;
            for &(x, w) in g.neighbors(u) {
                if alive[x] {
                    let before = degree[x];
                    degree[x] -= w;
                    if before >= theta && degree[x] < theta {
                        stack.push(x);
                    }
                }
            }
        }
    }
    Ok((0..n).filter(|&u| alive[u]).collect())
}

/// The largest induced subgraph of `h` in which every weighted degree is at
/// least `theta`, found by repeatedly deleting the vertex of smallest degree
/// (a min-heap with lazy deletion). Returned vertices refer to `h`'s parent
/// graph.
pub fn peel_core(h: &InducedSubgraph, theta: f64) -> InducedSubgraph {
    let g = &h.graph;
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut degree = g.weighted_degrees();
    let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = degree
        .iter()
        .enumerate()
        .map(|(v, &d)| Reverse((OrdF64(d), v)))
        .collect();

    loop {
        while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
            if !alive[v] || d != degree[v] {
                continue;
            }
            if d >= theta {
                heap.push(Reverse((OrdF64(d), v)));
                break;
            }
            alive[v] = false;
            for &(u, w) in g.neighbors(v) {
                if alive[u] {
                    degree[u] -= w;
                    heap.push(Reverse((OrdF64(degree[u]), u)));
                }
            }
        }
        // Incremental updates can drift; confirm with exact sums.
        let mut clean = true;
        for v in 0..n {
            if alive[v] {
                let exact: f64 = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&(u, _)| alive[u])
                    .map(|&(_, w)| w)
                    .sum();
                if exact != degree[v] {
                    degree[v] = exact;
                    heap.push(Reverse((OrdF64(exact), v)));
                }
                if exact < theta {
                    clean = false;
                }
            }
        }
        if clean {
            break;
        }
    }

    let core = induced(g, &alive);
    InducedSubgraph {
        vertices: core.vertices.iter().map(|&i| h.vertices[i]).collect(),
        graph: core.graph,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::directed_edges;

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
    fn unravel_cycle_is_a_path() {
        let d = directed_edges(&cycle(6));
        let t = unravel(&d, 0, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.level_sizes(), [1, 2, 2]);
        // root has two children; every other internal node has one
        let mut children = vec![0; t.len()];
        for (p, _, _) in t.tree_edges() {
            children[p] += 1;
        }
        assert_eq!(children[0], 2);
        assert!(t.level(1).all(|i| children[i] == 1));
    }

    #[test]
    fn unravel_k4_levels() {
        let d = directed_edges(&complete(4));
        for v in 0..4 {
            let t = unravel(&d, v, 2, DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(t.level_sizes(), [1, 3, 6]);
        }
    }

    #[test]
    fn unravel_radius_zero_and_errors() {
        let d = directed_edges(&complete(4));
        assert_eq!(unravel(&d, 2, 0, 1).unwrap().len(), 1);
        assert_eq!(
            unravel(&d, 4, 1, 10).unwrap_err(),
            CoverError::InvalidVertex(4)
        );
        match unravel(&d, 0, 3, 10) {
            Err(CoverError::BudgetExceeded {
                level, projected, ..
            }) => {
                assert_eq!(level, 2);
                assert_eq!(projected, 22.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unravel_non_backtracking_structure() {
        let d = directed_edges(&complete(5));
        let t = unravel(&d, 1, 3, DEFAULT_NODE_BUDGET).unwrap();
        for (i, n) in t.nodes().iter().enumerate().skip(1) {
            let e = d.edge(n.edge.unwrap());
            let p = &t.nodes()[n.parent.unwrap()];
            assert_eq!(n.depth, p.depth + 1);
            assert_eq!(n.weight, e.weight);
            match p.edge {
                None => assert_eq!(e.tail, 1),
                Some(pe) => {
                    assert_eq!(e.tail, d.edge(pe).head);
                    assert_ne!(n.edge.unwrap(), d.edge(pe).twin);
                }
            }
            let walk = t.walk(i);
            assert_eq!(walk.len(), n.depth + 1);
            assert!(walk.windows(3).all(|w| w[0] != w[2]));
        }
    }

    #[test]
    fn ball_examples() {
        let c6 = cycle(6);
        let b = ball(&c6, 0, 1).unwrap();
        assert_eq!(b.vertices, [0, 1, 5]);
        assert_eq!(b.graph.edge_count(), 2);
        assert_eq!(ball(&c6, 0, 3).unwrap().graph, c6);
        let b0 = ball(&c6, 4, 0).unwrap();
        assert_eq!(b0.vertices, [4]);
        assert_eq!(b0.graph.edge_count(), 0);
        assert_eq!(ball(&c6, 6, 1).unwrap_err(), CoverError::InvalidVertex(6));
    }

    #[test]
    fn residual_examples() {
        let c6 = cycle(6);
        let r = residual(&c6, 0, 0).unwrap();
        assert_eq!(r.vertices, [2, 3, 4]);
        let labels: Vec<_> = r
            .graph
            .edges()
            .iter()
            .map(|e| (r.vertices[e.u], r.vertices[e.v]))
            .collect();
        assert_eq!(labels, [(2, 3), (3, 4)]);
        assert!(residual(&complete(4), 2, 0).unwrap().is_empty());

        let two = unit(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        for r in 0..4 {
            assert_eq!(residual(&two, 0, r).unwrap().vertices, [3, 4, 5]);
        }
    }

    #[test]
    fn peel_core_examples() {
        let c6 = InducedSubgraph::whole(&cycle(6));
        assert_eq!(peel_core(&c6, 2.0).len(), 6);
        assert!(peel_core(&c6, 2.1).is_empty());
        let k5 = InducedSubgraph::whole(&complete(5));
        assert_eq!(peel_core(&k5, 3.5).len(), 5);
    }

    #[test]
    fn peel_core_keeps_dense_part() {
        // K4 on {0..3} with a pendant path 3-4-5.
        let g = unit(
            6,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (4, 5),
            ],
        );
        let core = peel_core(&InducedSubgraph::whole(&g), 3.0);
        assert_eq!(core.vertices, [0, 1, 2, 3]);
    }

    #[test]
    fn peel_core_maps_back_to_parent_ids() {
        let c6 = cycle(6);
        let r = residual(&c6, 0, 0).unwrap();
        let core = peel_core(&r, 1.0);
        assert_eq!(core.vertices, [2, 3, 4]);
        assert!(peel_core(&r, 1.5).is_empty());
    }

    #[test]
    fn residual_core_matches_peel_of_residual() {
        for seed in 0..6 {
            let g = crate::generators::random_regular(60, 4, seed).unwrap();
            let g = g
                .reweighted(
                    &(0..g.edge_count())
                        .map(|i| 0.5 + (i % 7) as f64 * 0.25)
                        .collect::<Vec<_>>(),
                )
                .unwrap();
            for v in [0, 17, 59] {
                for r in 0..3 {
                    for theta in [1.0, 2.5, 4.0, 6.0] {
                        let slow = peel_core(&residual(&g, v, r).unwrap(), theta).vertices;
                        assert_eq!(residual_core(&g, v, r, theta).unwrap(), slow);
                    }
                }
            }
        }
    }
}
